/// `C(m, k)`, saturating at `usize::MAX`.
pub fn binomial(m: usize, k: usize) -> usize {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (m - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// All `k`-subsets of `0..m` in lexicographic order.
pub fn combinations(m: usize, k: usize) -> Combinations {
    Combinations {
        m,
        current: if k <= m { Some((0..k).collect()) } else { None },
    }
}

pub struct Combinations {
    m: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.m - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_binomial() {
        for m in 0..9 {
            for k in 0..=m {
                assert_eq!(combinations(m, k).count(), binomial(m, k), "m={m} k={k}");
            }
        }
        assert_eq!(binomial(48, 7), 73_629_072);
        assert_eq!(combinations(3, 4).count(), 0);
    }

    #[test]
    fn lexicographic() {
        let all: Vec<_> = combinations(4, 2).collect();
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }
}
