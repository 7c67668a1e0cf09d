//! Set partitions of qubit labels with bounded part size.

use std::cmp::Ordering;
use std::fmt;

/// A partition of qubit labels. Canonical form: each part ascending, parts
/// ordered by their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(mut parts: Vec<Vec<usize>>) -> Self {
        parts.retain(|p| !p.is_empty());
        for p in parts.iter_mut() {
            p.sort_unstable();
        }
        parts.sort();
        Partition { parts }
    }

    pub fn singletons(labels: &[usize]) -> Self {
        Self::new(labels.iter().map(|&l| vec![l]).collect())
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn max_part(&self) -> usize {
        self.parts.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Every part of `self` lies inside some part of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.parts.iter().all(|p| {
            coarser
                .parts
                .iter()
                .any(|c| p.iter().all(|x| c.contains(x)))
        })
    }

    /// Search order: more parts first, then lexicographic on canonical form.
    pub fn search_cmp(&self, other: &Self) -> Ordering {
        other
            .parts
            .len()
            .cmp(&self.parts.len())
            .then_with(|| self.parts.cmp(&other.parts))
    }

    /// Parts rewritten as bit positions (`n - 1 - q`, qubit 0 being the most
    /// significant bit), each part descending and parts ordered by their
    /// highest position, e.g. `{3,1}{2,0}`.
    pub fn bit_positions(&self, n: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self
            .parts
            .iter()
            .map(|p| {
                let mut b: Vec<usize> = p.iter().map(|&q| n - 1 - q).collect();
                b.sort_unstable_by(|a, b| b.cmp(a));
                b
            })
            .collect();
        out.sort_by(|a, b| b.cmp(a));
        out
    }

    /// Brace-group rendering in bit positions.
    pub fn display_bits(&self, n: usize) -> String {
        render(&self.bit_positions(n))
    }
}

fn render(parts: &[Vec<usize>]) -> String {
    parts
        .iter()
        .map(|p| {
            let items: Vec<String> = p.iter().map(ToString::to_string).collect();
            format!("{{{}}}", items.join(","))
        })
        .collect()
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(&self.parts))
    }
}

/// All partitions of `labels` with parts of size at most `max_part`, in
/// search order (see [`Partition::search_cmp`]).
pub fn bounded_partitions(labels: &[usize], max_part: usize) -> Vec<Partition> {
    let n = labels.len();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    // Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[..i]).
    let mut assign = vec![0usize; n];
    let mut sizes = vec![0usize; n];
    fn rec(
        i: usize,
        blocks: usize,
        labels: &[usize],
        max_part: usize,
        assign: &mut Vec<usize>,
        sizes: &mut Vec<usize>,
        out: &mut Vec<Partition>,
    ) {
        if i == labels.len() {
            let mut parts = vec![Vec::new(); blocks];
            for (k, &b) in assign.iter().enumerate() {
                parts[b].push(labels[k]);
            }
            out.push(Partition::new(parts));
            return;
        }
        for b in 0..=blocks {
            if b < labels.len() && sizes[b] < max_part {
                assign[i] = b;
                sizes[b] += 1;
                rec(
                    i + 1,
                    blocks.max(b + 1),
                    labels,
                    max_part,
                    assign,
                    sizes,
                    out,
                );
                sizes[b] -= 1;
            }
        }
    }
    rec(
        0,
        0,
        labels,
        max_part.max(1),
        &mut assign,
        &mut sizes,
        &mut out,
    );
    out.sort_by(Partition::search_cmp);
    out
}

/// Subsets of `pool` containing `anchor` with exactly `size` elements,
/// lexicographic in `pool` order.
pub fn subsets_with(pool: &[usize], anchor: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(
        others: &[usize],
        k: usize,
        from: usize,
        cur: &mut Vec<usize>,
        anchor: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            let mut s = cur.clone();
            s.push(anchor);
            s.sort_unstable();
            out.push(s);
            return;
        }
        for i in from..others.len() {
            if others.len() - i < k - cur.len() {
                break;
            }
            cur.push(others[i]);
            rec(others, k, i + 1, cur, anchor, out);
            cur.pop();
        }
    }
    let others: Vec<usize> = pool.iter().copied().filter(|&x| x != anchor).collect();
    let mut out = Vec::new();
    if size == 0 || size - 1 > others.len() {
        return out;
    }
    rec(&others, size - 1, 0, &mut Vec::new(), anchor, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_numbers_bounded(n: usize, p: usize) -> usize {
        bounded_partitions(&(0..n).collect::<Vec<_>>(), p).len()
    }

    #[test]
    fn counts() {
        // Bell numbers for unrestricted parts.
        assert_eq!(bell_numbers_bounded(4, 4), 15);
        assert_eq!(bell_numbers_bounded(6, 6), 203);
        // Partitions of 4 into parts of size <= 2: 1 + 6 + 3 = 10.
        assert_eq!(bell_numbers_bounded(4, 2), 10);
        // Parts of size 1 only.
        assert_eq!(bell_numbers_bounded(5, 1), 1);
    }

    #[test]
    fn order_is_finest_first_then_lexicographic() {
        let ps = bounded_partitions(&[0, 1, 2, 3], 2);
        assert_eq!(ps[0], Partition::singletons(&[0, 1, 2, 3]));
        let two_part: Vec<String> = ps
            .iter()
            .filter(|p| p.len() == 2)
            .map(|p| p.to_string())
            .collect();
        assert_eq!(two_part, ["{0,1}{2,3}", "{0,2}{1,3}", "{0,3}{1,2}"]);
        for w in ps.windows(2) {
            assert_ne!(w[0].search_cmp(&w[1]), Ordering::Greater);
        }
    }

    #[test]
    fn bit_position_rendering() {
        let p = Partition::new(vec![vec![1, 3], vec![0, 2]]);
        assert_eq!(p.display_bits(4), "{3,1}{2,0}");
        assert_eq!(p.to_string(), "{0,2}{1,3}");
    }

    #[test]
    fn subsets() {
        let s = subsets_with(&[0, 1, 2, 3], 0, 2);
        assert_eq!(s, vec![vec![0, 1], vec![0, 2], vec![0, 3]]);
        assert_eq!(subsets_with(&[0, 1, 2, 3], 2, 1), vec![vec![2]]);
        assert_eq!(subsets_with(&[0, 1, 2, 3], 1, 4), vec![vec![0, 1, 2, 3]]);
        assert_eq!(subsets_with(&[0, 1, 2, 3], 1, 3).len(), 3);
        assert_eq!(subsets_with(&(0..12).collect::<Vec<_>>(), 0, 6).len(), 462);
    }

    #[test]
    fn refinement() {
        let fine = Partition::new(vec![vec![0], vec![1], vec![2, 3]]);
        let coarse = Partition::new(vec![vec![0, 1], vec![2, 3]]);
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
    }
}
