//! Transposition decomposition of the cyclic shift and its packing into
//! rounds of disjoint swaps.
//!
//! Registers are labelled `1..=m`. Lists of transpositions are stored in
//! application order: the first entry is applied first. A permutation is
//! represented as a 0-based destination map, `perm[k]` being the slot that
//! receives the contents of slot `k`. The cyclic shift sends slot `k` to slot
//! `k + 1 (mod m)`, which is the ket action
//! `|ψ_1⟩⊗…⊗|ψ_m⟩ ↦ |ψ_m⟩⊗|ψ_1⟩⊗…⊗|ψ_{m-1}⟩`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("copy count m = {m} must be at least 2")]
    TooFewCopies { m: usize },
    #[error("ancilla width s = {s} must lie in 1..={max} for m = {m}")]
    AncillaOutOfRange { s: usize, m: usize, max: usize },
    #[error("transposition ({i},{j}) is invalid for m = {m}")]
    BadTransposition { i: usize, j: usize, m: usize },
    #[error("unknown scheduling policy {0:?}")]
    UnknownPolicy(String),
}

/// Swap of registers `i < j`, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transposition {
    i: usize,
    j: usize,
}

impl Transposition {
    pub fn new(a: usize, b: usize, m: usize) -> Result<Self, ScheduleError> {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        if i == j || i == 0 || j > m {
            return Err(ScheduleError::BadTransposition { i: a, j: b, m });
        }
        Ok(Transposition { i, j })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn shares_register(&self, other: &Transposition) -> bool {
        self.i == other.i || self.i == other.j || self.j == other.i || self.j == other.j
    }
}

impl fmt::Display for Transposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchedulePolicy {
    /// Dependency-aware list scheduling, up to `s` swaps per round.
    #[default]
    Greedy,
    /// Each decomposition block is chunked separately; rounds never mix blocks.
    LayerRestricted,
}

impl FromStr for SchedulePolicy {
    type Err = ScheduleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(SchedulePolicy::Greedy),
            "layer-restricted" | "layer" => Ok(SchedulePolicy::LayerRestricted),
            other => Err(ScheduleError::UnknownPolicy(other.to_string())),
        }
    }
}

impl fmt::Display for SchedulePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchedulePolicy::Greedy => "greedy",
            SchedulePolicy::LayerRestricted => "layer-restricted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranspositionSchedule {
    pub m: usize,
    pub s: usize,
    pub policy: SchedulePolicy,
    pub rounds: Vec<Vec<Transposition>>,
}

impl TranspositionSchedule {
    /// Achieved depth.
    pub fn depth(&self) -> usize {
        self.rounds.len()
    }

    pub fn transposition_count(&self) -> usize {
        self.rounds.iter().map(Vec::len).sum()
    }

    pub fn flatten(&self) -> impl Iterator<Item = &Transposition> {
        self.rounds.iter().flatten()
    }
}

impl fmt::Display for TranspositionSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "round\ttranspositions")?;
        for (r, round) in self.rounds.iter().enumerate() {
            let items: Vec<String> = round.iter().map(|t| t.to_string()).collect();
            writeln!(f, "{}\t{}", r + 1, items.join(" "))?;
        }
        Ok(())
    }
}

/// Largest admissible ancilla width, `⌊m/2⌋`.
pub fn max_ancillas(m: usize) -> usize {
    m / 2
}

/// `h(m, s) = ⌈(m-1)/s⌉`.
pub fn depth_bound(m: usize, s: usize) -> usize {
    (m - 1).div_ceil(s)
}

/// Round count of the layer-restricted policy,
/// `⌈⌊m/2⌋/s⌉ + ⌈(⌈m/2⌉-1)/s⌉`.
pub fn layer_restricted_depth(m: usize, s: usize) -> usize {
    (m / 2).div_ceil(s) + (m.div_ceil(2) - 1).div_ceil(s)
}

fn check_params(m: usize, s: usize) -> Result<(), ScheduleError> {
    if m < 2 {
        return Err(ScheduleError::TooFewCopies { m });
    }
    let max = max_ancillas(m);
    if s == 0 || s > max {
        return Err(ScheduleError::AncillaOutOfRange { s, m, max });
    }
    Ok(())
}

/// The two disjoint blocks of the decomposition: first the reversal
/// `(i, m+1-i)` for `i = 1..=⌊m/2⌋`, then `(j, m+2-j)` for `j = 2..=⌈m/2⌉`.
fn blocks(m: usize) -> (Vec<Transposition>, Vec<Transposition>) {
    let first = (1..=m / 2).map(|i| Transposition { i, j: m + 1 - i }).collect();
    let second = (2..=m.div_ceil(2))
        .filter(|&j| j < m + 2 - j)
        .map(|j| Transposition { i: j, j: m + 2 - j })
        .collect();
    (first, second)
}

/// Decompose the cyclic shift into `m - 1` transpositions, application order.
pub fn decompose_cycle(m: usize) -> Result<Vec<Transposition>, ScheduleError> {
    if m < 2 {
        return Err(ScheduleError::TooFewCopies { m });
    }
    let (mut first, second) = blocks(m);
    first.extend(second);
    Ok(first)
}

/// Pack the decomposition into rounds of at most `s` disjoint transpositions.
pub fn schedule(m: usize, s: usize, policy: SchedulePolicy) -> Result<TranspositionSchedule, ScheduleError> {
    check_params(m, s)?;
    let rounds = match policy {
        SchedulePolicy::Greedy => greedy_rounds(&decompose_cycle(m)?, s),
        SchedulePolicy::LayerRestricted => {
            let (first, second) = blocks(m);
            first
                .chunks(s)
                .chain(second.chunks(s))
                .map(<[Transposition]>::to_vec)
                .collect()
        }
    };
    Ok(TranspositionSchedule { m, s, policy, rounds })
}

/// List scheduling over the dependency DAG in which each transposition depends
/// on every earlier one it shares a register with. Ready transpositions are
/// taken longest-remaining-chain first, ties broken by smallest `(i, j)`.
fn greedy_rounds(sequence: &[Transposition], s: usize) -> Vec<Vec<Transposition>> {
    let len = sequence.len();
    let preds: Vec<Vec<usize>> = (0..len)
        .map(|k| (0..k).filter(|&p| sequence[p].shares_register(&sequence[k])).collect())
        .collect();

    let mut height = vec![1usize; len];
    for k in (0..len).rev() {
        for &p in &preds[k] {
            height[p] = height[p].max(height[k] + 1);
        }
    }

    let mut done = vec![false; len];
    let mut rounds = Vec::new();
    while done.iter().any(|d| !d) {
        let mut ready: Vec<usize> = (0..len)
            .filter(|&k| !done[k] && preds[k].iter().all(|&p| done[p]))
            .collect();
        ready.sort_by_key(|&k| (std::cmp::Reverse(height[k]), sequence[k].i, sequence[k].j));
        ready.truncate(s);
        for &k in &ready {
            done[k] = true;
        }
        rounds.push(ready.into_iter().map(|k| sequence[k]).collect());
    }
    rounds
}

/// Compose transpositions in order and return the destination map.
pub fn compose(m: usize, transpositions: impl IntoIterator<Item = Transposition>) -> Vec<usize> {
    // contents[slot] = original slot of the item currently there
    let mut contents: Vec<usize> = (0..m).collect();
    for t in transpositions {
        contents.swap(t.i - 1, t.j - 1);
    }
    let mut perm = vec![0; m];
    for (slot, &orig) in contents.iter().enumerate() {
        perm[orig] = slot;
    }
    perm
}

/// The permutation realized by a schedule, rounds applied in order.
pub fn apply_schedule(sched: &TranspositionSchedule) -> Vec<usize> {
    compose(sched.m, sched.flatten().copied())
}

/// Destination map of the cyclic shift: slot `k` moves to `k + 1 (mod m)`.
pub fn cyclic_shift(m: usize) -> Vec<usize> {
    (0..m).map(|k| (k + 1) % m).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(i: usize, j: usize) -> Transposition {
        Transposition { i, j }
    }

    #[test]
    fn decomposition_of_eight() {
        // π₈ = (4,6)(3,7)(2,8)(4,5)(3,6)(2,7)(1,8), read right to left
        let expected = vec![t(1, 8), t(2, 7), t(3, 6), t(4, 5), t(2, 8), t(3, 7), t(4, 6)];
        assert_eq!(decompose_cycle(8).unwrap(), expected);
    }

    #[test]
    fn decomposition_of_nine() {
        let expected = vec![t(1, 9), t(2, 8), t(3, 7), t(4, 6), t(2, 9), t(3, 8), t(4, 7), t(5, 6)];
        assert_eq!(decompose_cycle(9).unwrap(), expected);
    }

    #[test]
    fn decomposition_of_two_is_a_swap() {
        assert_eq!(decompose_cycle(2).unwrap(), vec![t(1, 2)]);
        let s = schedule(2, 1, SchedulePolicy::Greedy).unwrap();
        assert_eq!(apply_schedule(&s), vec![1, 0]);
    }

    #[test]
    fn m_below_two_rejected() {
        assert_eq!(decompose_cycle(1), Err(ScheduleError::TooFewCopies { m: 1 }));
    }

    #[test]
    fn only_one_order_of_two_swaps_gives_the_three_cycle() {
        let a = t(1, 3);
        let b = t(2, 3);
        assert_eq!(compose(3, [a, b]), cyclic_shift(3));
        assert_ne!(compose(3, [b, a]), cyclic_shift(3));
    }

    #[test]
    fn greedy_round_counts_from_figures() {
        assert_eq!(schedule(8, 4, SchedulePolicy::Greedy).unwrap().depth(), 2);
        assert_eq!(schedule(9, 2, SchedulePolicy::Greedy).unwrap().depth(), 4);
        let s = schedule(5, 1, SchedulePolicy::Greedy).unwrap();
        assert_eq!(s.depth(), 4);
        assert!(s.rounds.iter().all(|r| r.len() == 1));
    }

    #[test]
    fn nine_three_discrepancy() {
        assert_eq!(schedule(9, 3, SchedulePolicy::Greedy).unwrap().depth(), 3);
        assert_eq!(schedule(9, 3, SchedulePolicy::LayerRestricted).unwrap().depth(), 4);
    }

    #[test]
    fn ancilla_range_checked() {
        assert_eq!(
            schedule(8, 5, SchedulePolicy::Greedy),
            Err(ScheduleError::AncillaOutOfRange { s: 5, m: 8, max: 4 })
        );
        assert!(schedule(8, 0, SchedulePolicy::Greedy).is_err());
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("greedy".parse(), Ok(SchedulePolicy::Greedy));
        assert_eq!("layer-restricted".parse(), Ok(SchedulePolicy::LayerRestricted));
        assert!("optimal".parse::<SchedulePolicy>().is_err());
    }

    #[test]
    fn table_output() {
        let s = schedule(4, 2, SchedulePolicy::Greedy).unwrap();
        assert_eq!(s.to_string(), "round\ttranspositions\n1\t(1,4) (2,3)\n2\t(2,4)\n");
    }
}
