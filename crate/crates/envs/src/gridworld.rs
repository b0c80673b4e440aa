//! Deterministic key-and-door grid mazes parsed from ASCII layouts.
//!
//! Layout alphabet: `#` wall, `.` floor, `S` start (exactly one), `T`
//! target (exactly one), `a`–`e` keys, `A`–`E` doors. A door can only be
//! entered once its matching key has been collected; keys are collected
//! automatically on entering their cell. Moving off the grid, into a wall,
//! or into a locked door is a no-op (the move is consumed, the position
//! unchanged).
//!
//! The MDP state is a (cell, collected-key set) pair, indexed as
//! `cell_rank · 2^K + flags` over non-wall cells in row-major order. Every
//! decision costs reward −1 until the target cell is reached; the target is
//! absorbing with reward 0, which makes it the terminal for trajectory
//! extraction. The four actions are up, down, left, right (indices 0–3).
//!
//! Because the same cell-and-direction choice recurs once per key
//! configuration, [`GridWorld::decision_classes`] groups those states into
//! one decision class per (cell, action), the grouping under which pay-off
//! constraints forbid a move *regardless* of which keys are held.

use std::collections::BTreeSet;
use stratlink_core::error::{Error, Result};
use stratlink_core::mdp::{Environment, RewardTable};
use stratlink_core::planners::{DecisionClass, DecisionClassMap};

/// Number of movement actions.
pub const ACTION_COUNT: usize = 4;

/// Action names in index order.
pub const ACTION_NAMES: [&str; ACTION_COUNT] = ["up", "down", "left", "right"];

/// Row/column offsets per action, aligned with [`ACTION_NAMES`].
const DELTAS: [(isize, isize); ACTION_COUNT] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

/// What occupies one grid cell. Key and door carry the key's bit index
/// (rank of its letter among the keys present in the layout).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Wall,
    Floor,
    Start,
    Target,
    Key(usize),
    Door(usize),
}

/// A parsed maze together with its MDP encoding.
#[derive(Debug, Clone)]
pub struct GridWorld {
    /// The maze dynamics over (cell, key-set) states.
    pub env: Environment,
    /// −1 per decision away from the target, 0 at the target.
    pub reward: RewardTable,
    /// Grid width in cells.
    pub width: usize,
    /// Grid height in cells.
    pub height: usize,
    /// Start cell as (row, column).
    pub start: (usize, usize),
    /// Target cell as (row, column).
    pub target: (usize, usize),
    /// Number of distinct keys in the layout.
    pub key_count: usize,
    /// Default trajectory cap: four times the cell count of the grid.
    pub horizon_cap: usize,
    grid: Vec<Cell>,
    cell_rank: Vec<Option<usize>>,
    cells: Vec<(usize, usize)>,
}

impl GridWorld {
    /// Parses a layout, validates it, and builds the MDP. Fails on ragged
    /// or empty grids, unknown characters, a missing or duplicated start
    /// or target, a door without its key, or a target the start cannot
    /// reach under the key rules.
    pub fn parse(text: &str) -> Result<Self> {
        let rows: Vec<Vec<char>> = text
            .lines()
            .map(|line| line.trim_end_matches('\r').chars().collect())
            .collect();
        if rows.is_empty() {
            return Err(Error::InvalidEnvironment("layout is empty".into()));
        }
        let height = rows.len();
        let width = rows[0].len();
        if width == 0 {
            return Err(Error::InvalidEnvironment("layout row 0 is empty".into()));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::InvalidEnvironment(format!(
                    "layout row {r} has {} characters, expected {width}",
                    row.len()
                )));
            }
        }

        let mut key_letters = BTreeSet::new();
        let mut door_letters = BTreeSet::new();
        for row in &rows {
            for &c in row {
                match c {
                    '#' | '.' | 'S' | 'T' => {}
                    'a'..='e' => {
                        key_letters.insert(c);
                    }
                    'A'..='E' => {
                        door_letters.insert(c.to_ascii_lowercase());
                    }
                    other => {
                        return Err(Error::InvalidEnvironment(format!(
                            "layout contains unsupported character {other:?}"
                        )));
                    }
                }
            }
        }
        for &door in &door_letters {
            if !key_letters.contains(&door) {
                return Err(Error::InvalidEnvironment(format!(
                    "door {:?} has no matching key {door:?}",
                    door.to_ascii_uppercase()
                )));
            }
        }
        let key_bit = |letter: char| key_letters.iter().position(|&k| k == letter).unwrap();

        let mut grid = Vec::with_capacity(height * width);
        let mut start = None;
        let mut target = None;
        for (r, row) in rows.iter().enumerate() {
            for (c, &ch) in row.iter().enumerate() {
                let cell = match ch {
                    '#' => Cell::Wall,
                    '.' => Cell::Floor,
                    'S' => {
                        if start.replace((r, c)).is_some() {
                            return Err(Error::InvalidEnvironment(
                                "layout has more than one start cell".into(),
                            ));
                        }
                        Cell::Start
                    }
                    'T' => {
                        if target.replace((r, c)).is_some() {
                            return Err(Error::InvalidEnvironment(
                                "layout has more than one target cell".into(),
                            ));
                        }
                        Cell::Target
                    }
                    'a'..='e' => Cell::Key(key_bit(ch)),
                    _ => Cell::Door(key_bit(ch.to_ascii_lowercase())),
                };
                grid.push(cell);
            }
        }
        let start =
            start.ok_or_else(|| Error::InvalidEnvironment("layout has no start cell".into()))?;
        let target =
            target.ok_or_else(|| Error::InvalidEnvironment("layout has no target cell".into()))?;

        let mut cell_rank = vec![None; height * width];
        let mut cells = Vec::new();
        for r in 0..height {
            for c in 0..width {
                if grid[r * width + c] != Cell::Wall {
                    cell_rank[r * width + c] = Some(cells.len());
                    cells.push((r, c));
                }
            }
        }

        let key_count = key_letters.len();
        let configs = 1usize << key_count;
        let state_count = cells.len() * configs;

        let mut world = GridWorld {
            env: Environment::new(1, 1, vec![1.0], vec![vec![(0, 1.0)]])?,
            reward: RewardTable::zeros(1, 1),
            width,
            height,
            start,
            target,
            key_count,
            horizon_cap: 4 * width * height,
            grid,
            cell_rank,
            cells,
        };

        let mut transitions = Vec::with_capacity(state_count * ACTION_COUNT);
        let mut reward_values = Vec::with_capacity(state_count * ACTION_COUNT);
        let mut labels = Vec::with_capacity(state_count);
        for rank in 0..world.cells.len() {
            let (r, c) = world.cells[rank];
            for flags in 0..configs {
                labels.push(world.describe(r, c, flags));
            }
        }
        for rank in 0..world.cells.len() {
            let (r, c) = world.cells[rank];
            for flags in 0..configs {
                let state = rank * configs + flags;
                for action in 0..ACTION_COUNT {
                    if world.grid[r * world.width + c] == Cell::Target {
                        transitions.push(vec![(state, 1.0)]);
                        reward_values.push(0.0);
                    } else {
                        let ((nr, nc), nflags) = world.step_cell(r, c, flags, action);
                        let next =
                            world.cell_rank[nr * world.width + nc].unwrap() * configs + nflags;
                        transitions.push(vec![(next, 1.0)]);
                        reward_values.push(-1.0);
                    }
                }
            }
        }
        let mut sigma = vec![0.0; state_count];
        sigma[world.cell_rank[start.0 * width + start.1].unwrap() * configs] = 1.0;

        // Labels are built per cell-major order above but states are
        // indexed the same way, so the two line up.
        world.env = Environment::new(state_count, ACTION_COUNT, sigma, transitions)?
            .with_state_labels(labels)?
            .with_action_labels(ACTION_NAMES.iter().map(|s| s.to_string()).collect())?;
        world.reward = RewardTable::new(state_count, ACTION_COUNT, reward_values)?;

        let reachable = world.env.reachable_states();
        let target_reachable = (0..configs)
            .any(|flags| reachable[world.state_of(target.0, target.1, flags).unwrap()]);
        if !target_reachable {
            return Err(Error::InvalidEnvironment(
                "target is unreachable from the start under the key rules".into(),
            ));
        }
        Ok(world)
    }

    /// Cell contents at (row, col); out-of-range coordinates read as wall.
    pub fn cell(&self, row: usize, col: usize) -> Cell {
        if row < self.height && col < self.width {
            self.grid[row * self.width + col]
        } else {
            Cell::Wall
        }
    }

    /// State index for a cell and key set, `None` for walls or
    /// out-of-range input.
    pub fn state_of(&self, row: usize, col: usize, flags: usize) -> Option<usize> {
        if row >= self.height || col >= self.width || flags >= (1 << self.key_count) {
            return None;
        }
        self.cell_rank[row * self.width + col]
            .map(|rank| rank * (1 << self.key_count) + flags)
    }

    /// Inverse of [`GridWorld::state_of`]: the (row, col) cell and key set
    /// of a state index.
    pub fn locate(&self, state: usize) -> ((usize, usize), usize) {
        let configs = 1 << self.key_count;
        (self.cells[state / configs], state % configs)
    }

    /// Where a move lands and which keys are held afterwards, applying the
    /// wall, bounds, door, and key-collection rules.
    pub fn step_cell(
        &self,
        row: usize,
        col: usize,
        flags: usize,
        action: usize,
    ) -> ((usize, usize), usize) {
        let (dr, dc) = DELTAS[action];
        let nr = row as isize + dr;
        let nc = col as isize + dc;
        if nr < 0 || nc < 0 || nr >= self.height as isize || nc >= self.width as isize {
            return ((row, col), flags);
        }
        let (nr, nc) = (nr as usize, nc as usize);
        match self.cell(nr, nc) {
            Cell::Wall => ((row, col), flags),
            Cell::Door(bit) if flags & (1 << bit) == 0 => ((row, col), flags),
            Cell::Key(bit) => ((nr, nc), flags | (1 << bit)),
            _ => ((nr, nc), flags),
        }
    }

    /// One decision class per (cell, action), whose members are that choice
    /// under every key configuration.
    pub fn decision_classes(&self) -> DecisionClassMap {
        let configs = 1 << self.key_count;
        let classes = (0..self.cells.len())
            .flat_map(|rank| {
                (0..ACTION_COUNT).map(move |action| DecisionClass {
                    representative: (rank * configs, action),
                    members: (0..configs).map(|f| (rank * configs + f, action)).collect(),
                })
            })
            .collect();
        DecisionClassMap::new(classes).expect("cell-action classes are disjoint and share actions")
    }

    fn describe(&self, row: usize, col: usize, flags: usize) -> String {
        let mut label = format!("({row},{col})");
        if flags != 0 {
            label.push('+');
            for bit in 0..self.key_count {
                if flags & (1 << bit) != 0 {
                    label.push((b'a' + bit as u8) as char);
                }
            }
        }
        label
    }
}

/// Bundled layouts with known strategic-link structure.
pub mod layouts {
    use super::GridWorld;

    /// One key, one door, one corridor: the door exit is the only pay-off
    /// of collecting the key, and every plain corridor move has a cheap
    /// local detour.
    pub const SIMPLE: &str = include_str!("../layouts/simple.txt");

    /// Two key-door pockets in sequence whose links do not interact: each
    /// key only matters for its own door.
    pub const INDEPENDENT: &str = include_str!("../layouts/independent.txt");

    /// Two keys on one corridor guarded by both doors in a row: losing
    /// either key voids the whole corridor, so the links are entangled.
    pub const CORRELATED: &str = include_str!("../layouts/correlated.txt");

    /// Parses [`SIMPLE`].
    pub fn simple() -> GridWorld {
        GridWorld::parse(SIMPLE).expect("bundled simple layout is valid")
    }

    /// Parses [`INDEPENDENT`].
    pub fn independent() -> GridWorld {
        GridWorld::parse(INDEPENDENT).expect("bundled independent layout is valid")
    }

    /// Parses [`CORRELATED`].
    pub fn correlated() -> GridWorld {
        GridWorld::parse(CORRELATED).expect("bundled correlated layout is valid")
    }
}
