//! Recommendation grouping and adoption-safety evaluation for shortcut
//! networks.
//!
//! A plan on a shortcut network buys a handful of preparation actions whose
//! value exists only through the jumps they enable. Recommending those
//! purchases one by one is dangerous: an agent that implements `prep_1` but
//! not its partner `prep_2` pays the preparation cost and never earns it
//! back. This crate measures exactly that danger and packages
//! recommendations so it cannot occur:
//!
//! 1. [`compute_recommendations`] finds the preparations the planner
//!    actually commits to (cumulative take-probability > ½) and scores every
//!    ordered pair: `𝔖(i→j) = π̃†(prep_i | s_ij) − π̃†:C_j(prep_i | s_ij)`,
//!    the drop in the plan's probability of buying `prep_i` once `prep_j`
//!    is forbidden everywhere. Both plans live in the *agent model's*
//!    universe — non-recommended preparations are already forbidden — and
//!    the set-up state `s_ij` is `prep_i`'s purchase point with `prep_j`'s
//!    flag cleared, so the ban can bite regardless of purchase order.
//! 2. [`strategy_aware_groups`] links pairs whose score exceeds a threshold
//!    and merges the per-seed groups into connected components, so each
//!    group is closed under strategic dependence.
//! 3. [`evaluate_adoption`] plays the agent model: adopted preparations are
//!    executed up front, everything else is forbidden, and the agent then
//!    follows the greedy constrained plan; the undiscounted return is the
//!    performance of that adoption.
//! 4. [`recommendation_report`] sweeps every union of whole groups for the
//!    three presentation methods over a family of environments and buckets
//!    the outcomes by the number of implemented recommendations.

use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use stratlink_core::error::{Error, Result};
use stratlink_core::mdp::{PlannerConfig, Policy};
use stratlink_core::planners::{is_terminal, plan, plan_constrained, ConstraintSet};
use stratlink_envs::shortcuts::ShortcutWorld;

/// One recommended preparation together with where the plan takes it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recommendation {
    /// Preparation id (1-based).
    pub prep: usize,
    /// The `(state, action)` decision at which the plan buys it: the first
    /// node with every lower-id recommended preparation already taken.
    pub setup: (usize, usize),
    /// Cumulative probability that an episode under the soft plan buys it.
    pub take_probability: f64,
}

/// The planner's recommended preparations and their pairwise link scores.
#[derive(Debug, Clone, Serialize)]
pub struct RecommendationSet {
    /// Recommendations in ascending preparation-id order (distinct).
    pub recommendations: Vec<Recommendation>,
    /// Row-major pairwise scores: `scores[i·n + j] = 𝔖(rec_i → rec_j)`;
    /// diagonal entries are 0 (a recommendation is not its own pay-off).
    pub scores: Vec<f64>,
}

impl RecommendationSet {
    /// Number of recommendations.
    pub fn len(&self) -> usize {
        self.recommendations.len()
    }

    /// True when the planner recommends nothing.
    pub fn is_empty(&self) -> bool {
        self.recommendations.is_empty()
    }

    /// The link score from recommendation `i` to recommendation `j`
    /// (indices into [`RecommendationSet::recommendations`]).
    pub fn score(&self, i: usize, j: usize) -> f64 {
        self.scores[i * self.recommendations.len() + j]
    }

    /// The recommended preparation ids, ascending.
    pub fn preps(&self) -> Vec<usize> {
        self.recommendations.iter().map(|r| r.prep).collect()
    }
}

/// How recommendations are packaged for delivery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GroupingMethod {
    /// Every recommendation on its own: the agent may adopt any subset.
    PickAndChoose,
    /// One indivisible bundle: the agent adopts everything or nothing.
    AllOrNothing,
    /// Strategically linked recommendations are bundled together.
    StrategyAware,
}

/// A partition of the recommendations into adoption units.
#[derive(Debug, Clone, Serialize)]
pub struct Grouping {
    /// Disjoint groups of preparation ids, each ascending, ordered by their
    /// smallest member; every recommendation appears in exactly one group.
    pub groups: Vec<Vec<usize>>,
    /// The packaging method that produced the groups.
    pub method: GroupingMethod,
    /// The score threshold used (strategy-aware only).
    pub threshold: Option<f64>,
}

/// The evaluated performance of adopting one union of whole groups.
#[derive(Debug, Clone, Serialize)]
pub struct AdoptionOutcome {
    /// Adopted preparation ids, ascending (a union of whole groups).
    pub adopted: Vec<usize>,
    /// Number of implemented recommendations, `adopted.len()`.
    pub count: usize,
    /// Undiscounted return of the agent model under this adoption.
    pub performance: f64,
}

/// Soft-plan forward pass: the probability that an episode started at `σ`
/// buys each preparation within the world's horizon cap.
fn take_probabilities(world: &ShortcutWorld, config: &PlannerConfig) -> Result<Vec<f64>> {
    let policy = plan(&world.env, &world.reward, config)?;
    Ok(forward_take_probabilities(world, &policy))
}

/// Forward state-distribution pass under an arbitrary policy: for each
/// preparation, the cumulative probability that an episode buys it within
/// the world's horizon cap.
fn forward_take_probabilities(world: &ShortcutWorld, policy: &Policy) -> Vec<f64> {
    let env = &world.env;
    let mut dist = env.initial_dist.clone();
    let mut taken = vec![0.0; world.prep_count];
    for _ in 0..world.horizon_cap() {
        let mut next = vec![0.0; env.state_count];
        for s in 0..env.state_count {
            let p = dist[s];
            if p == 0.0 {
                continue;
            }
            if is_terminal(env, &world.reward, s) {
                next[s] += p;
                continue;
            }
            let (node, flags) = world.locate(s);
            for a in 0..env.action_count {
                let pa = p * policy.prob(s, a);
                if pa == 0.0 {
                    continue;
                }
                if let Some(j) = world.prep_of_action(a) {
                    if node == 1 && flags & (1 << (j - 1)) == 0 {
                        taken[j - 1] += pa;
                    }
                }
                for &(succ, tp) in env.transition(s, a) {
                    next[succ] += pa * tp;
                }
            }
        }
        dist = next;
    }
    taken
}

/// The constraint pairs that forbid every preparation outside `allowed`,
/// expanded over all flag configurations through decision classes.
fn complement_ban(world: &ShortcutWorld, allowed: &[usize]) -> Vec<(usize, usize)> {
    let classes = world.decision_classes();
    let root = world.state_of(1, 0).expect("the initial node exists");
    let mut pairs = Vec::new();
    for j in 1..=world.prep_count {
        if !allowed.contains(&j) {
            let action = world.prep_action(j).expect("prep id is in range");
            pairs.extend(classes.expand(root, action));
        }
    }
    pairs
}

/// The preparations the soft plan commits to, with pairwise link scores.
///
/// A preparation is recommended when the plan buys it with cumulative
/// probability above ½. The recorded set-up decisions replay the
/// recommended purchases in id order from the initial node, which is also
/// the greedy order (the planner breaks its purchase ties toward the
/// lowest action index).
///
/// The pairwise scores measure dependence inside the *agent model's*
/// universe: an adopting agent never takes a preparation that was not
/// recommended, so both plans behind `𝔖(i→j)` already forbid every
/// non-recommended preparation, and the pay-off constraint additionally
/// forbids `prep_j` as a decision class — at the initial node under every
/// flag configuration — so no re-ordered purchase can smuggle it back in.
/// Each score is evaluated at `prep_i`'s purchase point with `prep_j`'s
/// flag cleared from the state. Without the clearing, a dependence of a
/// later purchase on an earlier one would be invisible (the earlier flag
/// is already set when the later preparation is bought, so forbidding the
/// earlier *action* changes nothing from there), and a singleton group
/// could strand a preparation away from the partner it needs.
pub fn compute_recommendations(
    world: &ShortcutWorld,
    config: &PlannerConfig,
) -> Result<RecommendationSet> {
    let taken = take_probabilities(world, config)?;
    let recommended: Vec<usize> = (1..=world.prep_count)
        .filter(|&j| taken[j - 1] > 0.5)
        .collect();

    // Set-up decision for the i-th recommendation: initial node with every
    // lower-id recommended preparation already bought.
    let mut flags = 0usize;
    let mut before = Vec::with_capacity(recommended.len());
    let mut recommendations = Vec::with_capacity(recommended.len());
    for &j in &recommended {
        let state = world
            .state_of(1, flags)
            .expect("initial-node states exist for every recommended flag set");
        let action = world.prep_action(j).expect("recommended id is in range");
        before.push(flags);
        recommendations.push(Recommendation {
            prep: j,
            setup: (state, action),
            take_probability: taken[j - 1],
        });
        flags |= 1 << (j - 1);
    }

    let classes = world.decision_classes();
    let n = recommendations.len();
    let mut scores = vec![0.0; n * n];
    if n > 0 {
        let root = world
            .state_of(1, 0)
            .expect("the initial node exists with no flags set");
        let base = complement_ban(world, &recommended);
        let base_policy = plan_constrained(
            &world.env,
            &world.reward,
            config,
            &ConstraintSet::new(&world.env, base.iter().copied())?,
        )?;
        // One extra plan per recommendation: the agent-model universe with
        // that preparation's class forbidden as well.
        let banned = recommendations
            .par_iter()
            .map(|rec| {
                let action = world.prep_action(rec.prep).expect("prep id is in range");
                let mut pairs = base.clone();
                pairs.extend(classes.expand(root, action));
                let constraint = ConstraintSet::new(&world.env, pairs)?;
                plan_constrained(&world.env, &world.reward, config, &constraint)
            })
            .collect::<Result<Vec<_>>>()?;
        for i in 0..n {
            let action = recommendations[i].setup.1;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let cleared = before[i] & !(1 << (recommendations[j].prep - 1));
                let state = world
                    .state_of(1, cleared)
                    .expect("initial-node states exist for every flag set");
                scores[i * n + j] =
                    base_policy.prob(state, action) - banned[j].prob(state, action);
            }
        }
    }
    Ok(RecommendationSet {
        recommendations,
        scores,
    })
}

/// Singleton groups: the agent may adopt any subset of recommendations.
pub fn pick_and_choose_groups(recs: &RecommendationSet) -> Grouping {
    Grouping {
        groups: recs.preps().into_iter().map(|p| vec![p]).collect(),
        method: GroupingMethod::PickAndChoose,
        threshold: None,
    }
}

/// One indivisible group holding every recommendation (none when empty).
pub fn all_or_nothing_groups(recs: &RecommendationSet) -> Grouping {
    let preps = recs.preps();
    Grouping {
        groups: if preps.is_empty() { vec![] } else { vec![preps] },
        method: GroupingMethod::AllOrNothing,
        threshold: None,
    }
}

/// True when a plan restricted to the `members` preparations still buys
/// every one of them: the group can stand on its own. Each cached answer is
/// keyed by the member list.
fn group_stands_alone(
    world: &ShortcutWorld,
    config: &PlannerConfig,
    members: &[usize],
    memo: &mut HashMap<Vec<usize>, bool>,
) -> Result<bool> {
    if let Some(&known) = memo.get(members) {
        return Ok(known);
    }
    let constraint = ConstraintSet::new(&world.env, complement_ban(world, members))?;
    let policy = plan_constrained(&world.env, &world.reward, config, &constraint)?;
    let taken = forward_take_probabilities(world, &policy);
    let ok = members.iter().all(|&j| taken[j - 1] > 0.5);
    memo.insert(members.to_vec(), ok);
    Ok(ok)
}

/// Bundles strategically dependent recommendations in two passes.
///
/// First the seed groups `𝒟_i = {i} ∪ {j : 𝔖(i→j) > threshold}` are built
/// and overlapping seed groups merged into connected components, so the
/// partition is unambiguous.
///
/// Pairwise scores ban one preparation at a time, so they cannot see a
/// disjunctive dependence: a preparation whose pay-off survives each single
/// ban (an alternative jump covers for it) but dies when two outside
/// partners disappear together would be stranded by its component. The
/// second pass therefore checks every component against the agent model it
/// implies — plan with everything outside the component forbidden — and
/// requires the plan to still buy each member. A component that strands a
/// member is merged with the first component that cures it (falling back to
/// its neighbour in order), until every component stands on its own. The
/// full recommendation set always passes, because buying each preparation
/// with high probability is what made it recommended.
pub fn strategy_aware_groups(
    world: &ShortcutWorld,
    config: &PlannerConfig,
    recs: &RecommendationSet,
    threshold: f64,
) -> Result<Grouping> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "grouping threshold must lie in (0, 1), got {threshold}"
        )));
    }
    let n = recs.len();
    // Union–find over recommendation indices; linking i with every j whose
    // score from i clears the threshold merges overlapping seed groups.
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && recs.score(i, j) > threshold {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        by_root.entry(r).or_default().push(recs.recommendations[i].prep);
    }
    let mut groups: Vec<Vec<usize>> = by_root.into_values().collect();

    // Self-sufficiency closure over the components.
    let mut memo: HashMap<Vec<usize>, bool> = HashMap::new();
    let mut idx = 0;
    while idx < groups.len() {
        if groups.len() == 1 || group_stands_alone(world, config, &groups[idx], &mut memo)? {
            idx += 1;
            continue;
        }
        // Find the first other component whose union with this one stands
        // alone; merge with it, or with the nearest neighbour if none does.
        let mut target = None;
        for other in 0..groups.len() {
            if other == idx {
                continue;
            }
            let mut union: Vec<usize> = groups[idx]
                .iter()
                .chain(groups[other].iter())
                .copied()
                .collect();
            union.sort_unstable();
            if group_stands_alone(world, config, &union, &mut memo)? {
                target = Some(other);
                break;
            }
        }
        let other = target.unwrap_or(if idx + 1 < groups.len() { idx + 1 } else { idx - 1 });
        let absorbed = groups.remove(idx.max(other));
        let kept = idx.min(other);
        groups[kept].extend(absorbed);
        groups[kept].sort_unstable();
        groups.sort_by_key(|g| g[0]);
        idx = 0;
    }

    Ok(Grouping {
        groups,
        method: GroupingMethod::StrategyAware,
        threshold: Some(threshold),
    })
}

/// Performance of the agent model under one adopted set: the adopted
/// preparations are executed first (id order, at the initial node), every
/// other preparation is forbidden as a decision class, and the agent then
/// follows the greedy argmax of the constrained soft plan. Returns the
/// undiscounted return of that single deterministic episode.
pub fn evaluate_adoption(
    world: &ShortcutWorld,
    config: &PlannerConfig,
    adopted: &[usize],
) -> Result<f64> {
    let mut adopted = adopted.to_vec();
    adopted.sort_unstable();
    adopted.dedup();
    if let Some(&bad) = adopted.iter().find(|&&j| j < 1 || j > world.prep_count) {
        return Err(Error::InvalidConfig(format!(
            "adopted preparation {bad} is out of range 1..={}",
            world.prep_count
        )));
    }

    let constraint = ConstraintSet::new(&world.env, complement_ban(world, &adopted))?;
    let policy = plan_constrained(&world.env, &world.reward, config, &constraint)?;

    let mut value = 0.0;
    let mut state = world.state_of(1, 0).expect("initial node exists");
    for &j in &adopted {
        let action = world.prep_action(j).expect("preparation id in range");
        value += world.reward.get(state, action);
        let (node, flags) = world.locate(state);
        debug_assert_eq!(node, 1, "adoption happens before the agent moves");
        state = world
            .state_of(1, flags | (1 << (j - 1)))
            .expect("flag states exist");
    }
    for _ in adopted.len()..world.horizon_cap() {
        if is_terminal(&world.env, &world.reward, state) {
            break;
        }
        let action = policy.argmax(state);
        value += world.reward.get(state, action);
        let row = world.env.transition(state, action);
        debug_assert_eq!(row.len(), 1, "shortcut dynamics are deterministic");
        state = row[0].0;
    }
    Ok(value)
}

/// Every union of whole groups, evaluated. Outcomes are keyed by the
/// adopted set; with disjoint groups each subset of groups gives a distinct
/// union, so this enumerates `2^G` adoptions including the empty one.
pub fn enumerate_adoptions(
    world: &ShortcutWorld,
    config: &PlannerConfig,
    grouping: &Grouping,
    cache: &mut HashMap<Vec<usize>, f64>,
) -> Result<Vec<AdoptionOutcome>> {
    let g = grouping.groups.len();
    let mut outcomes = Vec::with_capacity(1 << g);
    for mask in 0u32..(1 << g) {
        let mut adopted: Vec<usize> = grouping
            .groups
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask & (1 << i) != 0)
            .flat_map(|(_, group)| group.iter().copied())
            .collect();
        adopted.sort_unstable();
        let performance = match cache.get(&adopted) {
            Some(&v) => v,
            None => {
                let v = evaluate_adoption(world, config, &adopted)?;
                cache.insert(adopted.clone(), v);
                v
            }
        };
        outcomes.push(AdoptionOutcome {
            count: adopted.len(),
            adopted,
            performance,
        });
    }
    Ok(outcomes)
}

/// Per-k summary of a method on one environment.
#[derive(Debug, Clone, Serialize)]
pub struct KBucket {
    /// Number of implemented recommendations.
    pub k: usize,
    /// Mean performance over the unions with this k.
    pub average: f64,
    /// Worst performance over the unions with this k.
    pub worst: f64,
}

fn bucket_by_k(outcomes: &[AdoptionOutcome]) -> Vec<KBucket> {
    let mut per_k: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for o in outcomes {
        per_k.entry(o.count).or_default().push(o.performance);
    }
    per_k
        .into_iter()
        .map(|(k, values)| KBucket {
            k,
            average: values.iter().sum::<f64>() / values.len() as f64,
            worst: values.iter().copied().fold(f64::INFINITY, f64::min),
        })
        .collect()
}

/// One environment's full evaluation under all three methods.
#[derive(Debug, Clone, Serialize)]
pub struct EnvironmentEvaluation {
    /// Caller-assigned identifier (e.g. the generation seed).
    pub id: u64,
    /// Performance of adopting nothing (the prep-free agent).
    pub baseline: f64,
    /// Recommended preparation ids.
    pub recommended: Vec<usize>,
    /// The strategy-aware groups.
    pub groups: Vec<Vec<usize>>,
    /// Per-k buckets for pick-and-choose adoption.
    pub pick_and_choose: Vec<KBucket>,
    /// Per-k buckets for all-or-nothing adoption (endpoints only).
    pub all_or_nothing: Vec<KBucket>,
    /// Per-k buckets for strategy-aware adoption.
    pub strategy_aware: Vec<KBucket>,
}

/// Evaluates one environment end to end: recommendations, groupings, and
/// every whole-group adoption union for each method.
pub fn evaluate_environment(
    id: u64,
    world: &ShortcutWorld,
    config: &PlannerConfig,
    threshold: f64,
) -> Result<EnvironmentEvaluation> {
    let recs = compute_recommendations(world, config)?;
    let strategy = strategy_aware_groups(world, config, &recs, threshold)?;
    let pick = pick_and_choose_groups(&recs);
    let all = all_or_nothing_groups(&recs);
    let mut cache = HashMap::new();
    let pick_outcomes = enumerate_adoptions(world, config, &pick, &mut cache)?;
    let all_outcomes = enumerate_adoptions(world, config, &all, &mut cache)?;
    let strategy_outcomes = enumerate_adoptions(world, config, &strategy, &mut cache)?;
    let baseline = cache
        .get(&Vec::new())
        .copied()
        .expect("the empty adoption is always enumerated");
    Ok(EnvironmentEvaluation {
        id,
        baseline,
        recommended: recs.preps(),
        groups: strategy.groups.clone(),
        pick_and_choose: bucket_by_k(&pick_outcomes),
        all_or_nothing: bucket_by_k(&all_outcomes),
        strategy_aware: bucket_by_k(&strategy_outcomes),
    })
}

/// One point of an aggregated performance curve.
#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    /// Number of implemented recommendations.
    pub k: usize,
    /// Mean over environments (where k is attainable) of the per-k average.
    pub mean_average: f64,
    /// Mean over environments (where k is attainable) of the per-k worst.
    pub mean_worst: f64,
    /// How many environments attain this k.
    pub environments: usize,
}

/// The cross-environment report: per-environment detail plus aggregated
/// per-method curves and the mean baseline.
#[derive(Debug, Clone, Serialize)]
pub struct RecommendationReport {
    /// The grouping threshold used for the strategy-aware method.
    pub threshold: f64,
    /// Mean baseline over environments.
    pub baseline_mean: f64,
    /// Per-environment evaluations, in input order.
    pub environments: Vec<EnvironmentEvaluation>,
    /// Aggregated pick-and-choose curve.
    pub pick_and_choose: Vec<CurvePoint>,
    /// Aggregated all-or-nothing curve (endpoints only).
    pub all_or_nothing: Vec<CurvePoint>,
    /// Aggregated all-or-nothing curve with unattainable intermediate k
    /// filled by the environment's baseline (nothing partially adopted).
    pub all_or_nothing_filled: Vec<CurvePoint>,
    /// Aggregated strategy-aware curve.
    pub strategy_aware: Vec<CurvePoint>,
}

fn aggregate(per_env: Vec<Vec<KBucket>>) -> Vec<CurvePoint> {
    let mut sums: BTreeMap<usize, (f64, f64, usize)> = BTreeMap::new();
    for buckets in &per_env {
        for b in buckets {
            let entry = sums.entry(b.k).or_insert((0.0, 0.0, 0));
            entry.0 += b.average;
            entry.1 += b.worst;
            entry.2 += 1;
        }
    }
    sums.into_iter()
        .map(|(k, (avg, worst, n))| CurvePoint {
            k,
            mean_average: avg / n as f64,
            mean_worst: worst / n as f64,
            environments: n,
        })
        .collect()
}

/// Fills the gap between an all-or-nothing environment's endpoints with its
/// baseline: every k strictly between 0 and the full bundle is "attainable"
/// by adopting nothing.
fn fill_with_baseline(buckets: &[KBucket], baseline: f64) -> Vec<KBucket> {
    let max_k = buckets.iter().map(|b| b.k).max().unwrap_or(0);
    let mut filled: BTreeMap<usize, KBucket> = buckets.iter().map(|b| (b.k, b.clone())).collect();
    for k in 0..=max_k {
        filled.entry(k).or_insert(KBucket {
            k,
            average: baseline,
            worst: baseline,
        });
    }
    filled.into_values().collect()
}

/// Evaluates a family of environments concurrently and aggregates the
/// per-method curves. `worlds` carries (identifier, environment) pairs so
/// the report can name each environment by its generation seed.
pub fn recommendation_report(
    worlds: &[(u64, ShortcutWorld)],
    config: &PlannerConfig,
    threshold: f64,
) -> Result<RecommendationReport> {
    let environments: Vec<EnvironmentEvaluation> = worlds
        .par_iter()
        .map(|(id, world)| evaluate_environment(*id, world, config, threshold))
        .collect::<Result<_>>()?;
    let baseline_mean = environments.iter().map(|e| e.baseline).sum::<f64>()
        / environments.len().max(1) as f64;
    let pick = aggregate(environments.iter().map(|e| e.pick_and_choose.clone()).collect());
    let all = aggregate(environments.iter().map(|e| e.all_or_nothing.clone()).collect());
    let all_filled = aggregate(
        environments
            .iter()
            .map(|e| fill_with_baseline(&e.all_or_nothing, e.baseline))
            .collect(),
    );
    let strategy = aggregate(environments.iter().map(|e| e.strategy_aware.clone()).collect());
    Ok(RecommendationReport {
        threshold,
        baseline_mean,
        environments,
        pick_and_choose: pick,
        all_or_nothing: all,
        all_or_nothing_filled: all_filled,
        strategy_aware: strategy,
    })
}
