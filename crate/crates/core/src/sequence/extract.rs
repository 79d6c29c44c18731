//! Turning an almost invariant window-tail space into an invariant one by
//! finitely many going-down / going-up moves.

use std::fmt;

use super::{power_error_profile, seq_error_dimension, seq_going_down, seq_going_up, BandedOperator, WindowTailSpace};

pub const DEFAULT_MAX_DEPTH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    Down,
    Up,
}

impl MoveKind {
    pub fn apply(self, t: &BandedOperator, y: &WindowTailSpace) -> WindowTailSpace {
        match self {
            MoveKind::Down => seq_going_down(t, y),
            MoveKind::Up => seq_going_up(t, y),
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MoveKind::Down => "DOWN",
            MoveKind::Up => "UP",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub kind: MoveKind,
    pub d_after: usize,
    pub space_after: WindowTailSpace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// `d(Z, T) = 0`, checked before returning.
    Invariant(WindowTailSpace),
    /// Neither a pure-down nor a pure-up chain of length `<= depth` lowered
    /// `d`; `profile` holds `d(W, T^m)` for `m = 1..=depth` at the last space.
    NoReductionFound { depth: usize, profile: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub initial: WindowTailSpace,
    pub initial_d: usize,
    pub moves: Vec<Move>,
    pub outcome: Outcome,
}

impl ReductionTrace {
    /// The last space reached, whether or not it is invariant.
    pub fn final_space(&self) -> &WindowTailSpace {
        self.moves.last().map_or(&self.initial, |m| &m.space_after)
    }

    pub fn invariant_space(&self) -> Option<&WindowTailSpace> {
        match &self.outcome {
            Outcome::Invariant(z) => Some(z),
            Outcome::NoReductionFound { .. } => None,
        }
    }
}

impl fmt::Display for ReductionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "START d={} {}", self.initial_d, self.initial)?;
        for m in &self.moves {
            writeln!(f, "{} d={} {}", m.kind, m.d_after, m.space_after)?;
        }
        match &self.outcome {
            Outcome::Invariant(z) => write!(f, "INVARIANT {z}"),
            Outcome::NoReductionFound { depth, profile } => {
                let p: Vec<String> = profile.iter().map(ToString::to_string).collect();
                write!(f, "NO-REDUCTION depth={depth} profile={}", p.join(" "))
            }
        }
    }
}

/// Applies `kind` up to `max_depth` times, stopping at the first strict drop
/// below `d`. Returns the moves made if a drop occurred.
fn search_chain(
    t: &BandedOperator,
    start: &WindowTailSpace,
    d: usize,
    kind: MoveKind,
    max_depth: usize,
) -> Option<Vec<Move>> {
    let mut chain = Vec::new();
    let mut current = start.clone();
    for _ in 0..max_depth {
        let next = kind.apply(t, &current);
        let d_next = seq_error_dimension(t, &next);
        let stalled = next == current;
        chain.push(Move { kind, d_after: d_next, space_after: next.clone() });
        if d_next < d {
            return Some(chain);
        }
        if stalled {
            return None;
        }
        current = next;
    }
    None
}

/// Searches for a `T`-invariant half-space reachable from `y`.
///
/// Each round tries a pure-down chain first and a pure-up chain second, and
/// accepts the first strict decrease of `d`. Rounds repeat until `d = 0` or
/// neither chain decreases within `max_depth` moves.
pub fn extract_invariant(t: &BandedOperator, y: &WindowTailSpace, max_depth: usize) -> ReductionTrace {
    let max_depth = max_depth.max(1);
    let initial_d = seq_error_dimension(t, y);
    let mut moves: Vec<Move> = Vec::new();
    let mut current = y.clone();
    let mut d = initial_d;
    while d > 0 {
        let chain = search_chain(t, &current, d, MoveKind::Down, max_depth)
            .or_else(|| search_chain(t, &current, d, MoveKind::Up, max_depth));
        let Some(chain) = chain else {
            let profile = power_error_profile(t, &current, max_depth);
            return ReductionTrace {
                initial: y.clone(),
                initial_d,
                moves,
                outcome: Outcome::NoReductionFound { depth: max_depth, profile },
            };
        };
        let last = chain.last().expect("chains are nonempty");
        current = last.space_after.clone();
        d = last.d_after;
        moves.extend(chain);
    }
    debug_assert!(super::seq_is_invariant(t, &current));
    ReductionTrace { initial: y.clone(), initial_d, moves, outcome: Outcome::Invariant(current) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int;
    use crate::sequence::SparseVec;

    #[test]
    fn example_needs_one_down_move() {
        let t = BandedOperator::from_columns([(0, SparseVec::unit(1)), (-1, SparseVec::unit(2))]);
        let trace = extract_invariant(&t, &WindowTailSpace::tail(0), DEFAULT_MAX_DEPTH);
        assert_eq!(trace.initial_d, 2);
        assert_eq!(trace.moves.len(), 1);
        assert_eq!(trace.moves[0].kind, MoveKind::Down);
        assert_eq!(trace.outcome, Outcome::Invariant(WindowTailSpace::tail(-2)));
    }

    #[test]
    fn perturbed_tail() {
        let y = WindowTailSpace::new(-1, [SparseVec::from_pairs([(0, int(1)), (5, int(1))])]).unwrap();
        let trace = extract_invariant(&BandedOperator::shift(-1), &y, DEFAULT_MAX_DEPTH);
        assert_eq!(trace.moves.len(), 1);
        assert_eq!(trace.invariant_space(), Some(&WindowTailSpace::tail(-1)));
        assert!(trace.to_string().ends_with("INVARIANT cutoff=-1 window=[]"));
    }

    #[test]
    fn forward_shift_has_no_reduction() {
        let trace = extract_invariant(&BandedOperator::shift(1), &WindowTailSpace::tail(0), 10);
        assert_eq!(
            trace.outcome,
            Outcome::NoReductionFound { depth: 10, profile: (1..=10).collect() }
        );
    }

    #[test]
    fn already_invariant() {
        let trace = extract_invariant(&BandedOperator::shift(-1), &WindowTailSpace::tail(4), 3);
        assert!(trace.moves.is_empty());
        assert_eq!(trace.outcome, Outcome::Invariant(WindowTailSpace::tail(4)));
    }
}
