//! Reliability rank ordering and ORBGRAND noise-effect pattern generation.
//!
//! A pattern is a set of distinct ranks in `1..=μ`; its logistic weight is
//! the sum of its ranks. Patterns are produced in nondecreasing weight. Ties
//! are broken by cardinality (fewer elements first) and then
//! lexicographically on the sorted rank list, so the order is fully pinned.
//!
//! Each (weight, cardinality) cell is the set of partitions of the weight
//! into that many distinct parts no larger than μ. The enumerator walks
//! those partitions in lexicographic order by shifting mass rightwards, and
//! keeps only the current partition as state.

use crate::error::{Error, Result};

/// Ascending order of reliability penalties.
#[derive(Clone, Debug, PartialEq)]
pub struct RankPermutation {
    /// `order[r - 1]` is the candidate index holding rank `r`.
    order: Vec<usize>,
    /// Penalties in rank order.
    weights: Vec<f64>,
}

impl RankPermutation {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Candidate index for a 1-based rank.
    #[inline]
    pub fn candidate(&self, rank: usize) -> usize {
        self.order[rank - 1]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn sorted_weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Stable ascending sort of nonnegative weights; equal weights keep their
/// original index order.
pub fn rank_sort(weights: &[f64]) -> Result<RankPermutation> {
    if let Some((index, &value)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| w.is_nan() || **w < 0.0)
    {
        return Err(Error::InvalidWeight { index, value });
    }
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]).then(a.cmp(&b)));
    let sorted = order.iter().map(|&i| weights[i]).collect();
    Ok(RankPermutation {
        order,
        weights: sorted,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    ranks: Vec<usize>,
    weight: u64,
}

impl Pattern {
    pub fn empty() -> Self {
        Pattern {
            ranks: Vec::new(),
            weight: 0,
        }
    }

    /// Build from strictly increasing ranks.
    pub fn new(ranks: Vec<usize>) -> Self {
        debug_assert!(ranks.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(ranks.first().is_none_or(|&r| r >= 1));
        let weight = ranks.iter().map(|&r| r as u64).sum();
        Pattern { ranks, weight }
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Logistic weight: the sum of ranks.
    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Fresh,
    Running,
    Exhausted,
}

/// Resumable generator over all subsets of `1..=μ` in logistic-weight order.
#[derive(Clone, Debug)]
pub struct PatternEnumerator {
    mu: usize,
    max_weight: u64,
    weight: u64,
    parts: Vec<usize>,
    state: State,
    emitted: u64,
}

/// Sum of the `m` largest distinct values in `1..=mu`.
#[inline]
fn top_sum(m: u64, mu: u64) -> u64 {
    m * mu - m * m.saturating_sub(1) / 2
}

impl PatternEnumerator {
    /// Enumerator with no weight cap.
    pub fn new(mu: usize) -> Self {
        let cap = top_sum(mu as u64, mu as u64);
        Self::with_max_weight(mu, cap)
    }

    pub fn with_max_weight(mu: usize, max_weight: u64) -> Self {
        PatternEnumerator {
            mu,
            max_weight: max_weight.min(top_sum(mu as u64, mu as u64)),
            weight: 0,
            parts: Vec::with_capacity(16),
            state: State::Fresh,
            emitted: 0,
        }
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn max_weight(&self) -> u64 {
        self.max_weight
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    /// Can `m` distinct parts, each in `(floor, μ]`, sum to `total`?
    #[inline]
    fn feasible(&self, m: usize, floor: usize, total: u64) -> bool {
        if m == 0 {
            return total == 0;
        }
        if floor + m > self.mu {
            return false;
        }
        let (m64, f64_) = (m as u64, floor as u64);
        let lo = m64 * f64_ + m64 * (m64 + 1) / 2;
        lo <= total && total <= top_sum(m64, self.mu as u64)
    }

    /// Lexicographically smallest completion of `parts[from..]`.
    fn fill(&mut self, from: usize, card: usize, mut floor: usize, mut total: u64) {
        self.parts.truncate(from);
        let mu = self.mu as u64;
        for pos in from..card {
            let rest = (card - pos - 1) as u64;
            let v = if rest == 0 {
                total
            } else {
                (floor as u64 + 1).max(total.saturating_sub(top_sum(rest, mu)))
            };
            self.parts.push(v as usize);
            floor = v as usize;
            total -= v;
        }
    }

    /// Lexicographic successor within the current (weight, cardinality) cell.
    fn step_in_cell(&mut self) -> bool {
        let card = self.parts.len();
        if card < 2 {
            return false;
        }
        let mut prefix: u64 = self.parts[..card - 1].iter().map(|&p| p as u64).sum();
        for j in (0..card - 1).rev() {
            prefix -= self.parts[j] as u64;
            let remaining = self.weight - prefix;
            let v = self.parts[j] + 1;
            if (v as u64) < remaining && self.feasible(card - j - 1, v, remaining - v as u64) {
                self.parts[j] = v;
                self.fill(j + 1, card, v, remaining - v as u64);
                return true;
            }
        }
        false
    }

    /// Advance to the first pattern of the next nonempty cell.
    fn step_cell(&mut self) -> bool {
        let mut card = self.parts.len();
        loop {
            card += 1;
            let min_w = (card * (card + 1) / 2) as u64;
            if card > self.mu || min_w > self.weight {
                self.weight += 1;
                if self.weight > self.max_weight {
                    return false;
                }
                card = 1;
            }
            if self.feasible(card, 0, self.weight) {
                self.fill(0, card, 0, self.weight);
                return true;
            }
        }
    }

    /// Advance and borrow the next pattern's ranks without allocating.
    pub fn advance(&mut self) -> Option<&[usize]> {
        match self.state {
            State::Exhausted => return None,
            State::Fresh => {
                self.state = State::Running;
            }
            State::Running => {
                if !self.step_in_cell() && !self.step_cell() {
                    self.state = State::Exhausted;
                    self.parts.clear();
                    return None;
                }
            }
        }
        self.emitted += 1;
        Some(&self.parts)
    }

    /// Weight of the pattern most recently returned by `advance`.
    pub fn current_weight(&self) -> u64 {
        self.weight
    }
}

impl Iterator for PatternEnumerator {
    type Item = Pattern;

    fn next(&mut self) -> Option<Pattern> {
        let weight_before = self.weight;
        let ranks = self.advance()?.to_vec();
        let weight = self.weight;
        debug_assert!(weight >= weight_before);
        Some(Pattern { ranks, weight })
    }
}
