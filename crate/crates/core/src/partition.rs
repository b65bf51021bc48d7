//! Set partitions as restricted growth strings.
//!
//! A restricted growth string `a` of length `n` satisfies `a[0] = 0` and
//! `a[i] <= 1 + max(a[..i])`. Each string names one partition of `{0..n}`
//! with block labels assigned in order of first appearance, so bin
//! relabelings are never enumerated twice.

/// Iterator over restricted growth strings of length `len` using at most
/// `max_blocks` distinct labels, in lexicographic order.
#[derive(Debug, Clone)]
pub struct Partitions {
    current: Vec<usize>,
    // prefix maxima: maxes[i] = max(current[..=i])
    maxes: Vec<usize>,
    max_blocks: usize,
    done: bool,
}

impl Partitions {
    pub fn new(len: usize, max_blocks: usize) -> Self {
        Partitions {
            current: vec![0; len],
            maxes: vec![0; len],
            max_blocks,
            done: max_blocks == 0 && len > 0,
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.current.len();
        for i in (1..n).rev() {
            let limit = (self.maxes[i - 1] + 1).min(self.max_blocks - 1);
            if self.current[i] < limit {
                self.current[i] += 1;
                self.maxes[i] = self.maxes[i - 1].max(self.current[i]);
                for j in i + 1..n {
                    self.current[j] = 0;
                    self.maxes[j] = self.maxes[i];
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for Partitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        if !self.advance() {
            self.done = true;
        }
        Some(out)
    }
}

/// Number of partitions of an `n`-set into at most `max_blocks` blocks,
/// saturating at `u128::MAX`.
pub fn count(n: usize, max_blocks: usize) -> u128 {
    if n == 0 {
        return 1;
    }
    // Stirling numbers of the second kind, row by row.
    let mut row = vec![0u128; max_blocks + 1];
    row[0] = 1;
    for _ in 0..n {
        let mut next = vec![0u128; max_blocks + 1];
        for k in 1..=max_blocks {
            next[k] = (k as u128)
                .saturating_mul(row[k])
                .saturating_add(row[k - 1]);
        }
        row = next;
    }
    row.iter().fold(0u128, |acc, v| acc.saturating_add(*v))
}

/// Number of blocks used by a restricted growth string.
pub fn blocks(rgs: &[usize]) -> usize {
    rgs.iter().max().map_or(0, |m| m + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let bell = [1u128, 1, 2, 5, 15, 52, 203, 877];
        for (n, b) in bell.iter().enumerate() {
            assert_eq!(count(n, n.max(1)), *b);
            if n > 0 {
                assert_eq!(Partitions::new(n, n).count() as u128, *b);
            }
        }
    }

    #[test]
    fn bounded_blocks_match_stirling_sums() {
        // S(4,1) + S(4,2) = 1 + 7
        assert_eq!(count(4, 2), 8);
        let all: Vec<_> = Partitions::new(4, 2).collect();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|p| blocks(p) <= 2));
        assert_eq!(all[0], vec![0, 0, 0, 0]);
        assert_eq!(all[7], vec![0, 1, 1, 1]);
    }

    #[test]
    fn three_items_two_bins() {
        let all: Vec<_> = Partitions::new(3, 2).collect();
        assert_eq!(
            all,
            vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0], vec![0, 1, 1]]
        );
    }
}
