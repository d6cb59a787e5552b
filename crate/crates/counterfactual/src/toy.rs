//! A 3x3 grid world small enough to enumerate every baseline path, used to
//! check the Monte Carlo threat estimator against exact probabilities.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::threat::{Horizon, Outcome, RolloutEnv};

pub const SIZE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Stay,
    North,
    South,
    East,
    West,
}

impl Move {
    pub const ALL: [Move; 5] = [Move::Stay, Move::North, Move::South, Move::East, Move::West];

    fn delta(self) -> (i32, i32) {
        match self {
            Move::Stay => (0, 0),
            Move::North => (0, 1),
            Move::South => (0, -1),
            Move::East => (1, 0),
            Move::West => (-1, 0),
        }
    }
}

/// Cell coordinates `(x, y)`, both in `0..SIZE`.
pub type Cell = (i32, i32);

/// Moves off the grid leave the agent in place; entering a hazard fails,
/// entering the goal ends the episode safely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridWorld {
    pub hazards: Vec<Cell>,
    pub goal: Cell,
}

impl Default for GridWorld {
    fn default() -> Self {
        Self {
            hazards: vec![(1, 1), (2, 0)],
            goal: (2, 2),
        }
    }
}

impl GridWorld {
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..SIZE)
            .flat_map(|x| (0..SIZE).map(move |y| (x, y)))
            .filter(|c| self.outcome(c) == Outcome::Running)
    }

    /// Exact failure probability of taking `action` and then moving uniformly
    /// at random, by enumerating every baseline path.
    pub fn exact_threat(&self, cell: Cell, action: Move, horizon: Horizon) -> f64 {
        let Horizon::Steps(h) = horizon else {
            panic!("exact enumeration needs a finite horizon");
        };
        let next = self.step(&cell, action);
        self.failure_within(next, h.saturating_sub(1))
    }

    fn failure_within(&self, cell: Cell, steps: usize) -> f64 {
        match self.outcome(&cell) {
            Outcome::Failure => 1.0,
            Outcome::Safe => 0.0,
            Outcome::Running if steps == 0 => 0.0,
            Outcome::Running => {
                Move::ALL
                    .iter()
                    .map(|&m| self.failure_within(self.step(&cell, m), steps - 1))
                    .sum::<f64>()
                    / Move::ALL.len() as f64
            }
        }
    }
}

impl RolloutEnv for GridWorld {
    type State = Cell;
    type Action = Move;

    fn step(&self, &(x, y): &Cell, action: Move) -> Cell {
        let (dx, dy) = action.delta();
        let (nx, ny) = (x + dx, y + dy);
        if (0..SIZE).contains(&nx) && (0..SIZE).contains(&ny) {
            (nx, ny)
        } else {
            (x, y)
        }
    }

    fn outcome(&self, cell: &Cell) -> Outcome {
        if self.hazards.contains(cell) {
            Outcome::Failure
        } else if *cell == self.goal {
            Outcome::Safe
        } else {
            Outcome::Running
        }
    }

    fn random_action(&self, _: &Cell, rng: &mut ChaCha8Rng) -> Move {
        Move::ALL[rng.random_range(0..Move::ALL.len())]
    }
}
