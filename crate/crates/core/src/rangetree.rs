//! Balanced range structures over a fixed set of `n` slots.

/// Point assignment (monotone raise), range maximum query.
#[derive(Debug, Clone)]
pub struct RangeMaxTree<T> {
    size: usize,
    tree: Vec<T>,
    bottom: T,
}

impl<T: Ord + Copy> RangeMaxTree<T> {
    pub fn new(n: usize, bottom: T) -> Self {
        let size = n.max(1).next_power_of_two();
        RangeMaxTree { size, tree: vec![bottom; 2 * size], bottom }
    }

    /// `slot := max(slot, value)`.
    pub fn raise(&mut self, slot: usize, value: T) {
        let mut i = slot + self.size;
        if self.tree[i] >= value {
            return;
        }
        self.tree[i] = value;
        while i > 1 {
            i /= 2;
            let m = self.tree[2 * i].max(self.tree[2 * i + 1]);
            if self.tree[i] == m {
                break;
            }
            self.tree[i] = m;
        }
    }

    /// Maximum over the half-open slot range `lo..hi`.
    pub fn max(&self, lo: usize, hi: usize) -> T {
        let mut res = self.bottom;
        let (mut l, mut r) = (lo + self.size, hi + self.size);
        while l < r {
            if l & 1 == 1 {
                res = res.max(self.tree[l]);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                res = res.max(self.tree[r]);
            }
            l /= 2;
            r /= 2;
        }
        res
    }
}

/// Range raise (`slot := max(slot, value)` on a range), point and range
/// maximum queries.
#[derive(Debug, Clone)]
pub struct StabbingMaxTree<T> {
    size: usize,
    /// Raise applied to a node's whole range.
    tag: Vec<T>,
    /// Maximum of anything raised inside a node's range.
    sub: Vec<T>,
    bottom: T,
}

impl<T: Ord + Copy> StabbingMaxTree<T> {
    pub fn new(n: usize, bottom: T) -> Self {
        let size = n.max(1).next_power_of_two();
        StabbingMaxTree { size, tag: vec![bottom; 2 * size], sub: vec![bottom; 2 * size], bottom }
    }

    pub fn raise_range(&mut self, lo: usize, hi: usize, value: T) {
        if lo >= hi {
            return;
        }
        let (mut l, mut r) = (lo + self.size, hi + self.size);
        while l < r {
            if l & 1 == 1 {
                self.tag[l] = self.tag[l].max(value);
                self.sub[l] = self.sub[l].max(value);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                self.tag[r] = self.tag[r].max(value);
                self.sub[r] = self.sub[r].max(value);
            }
            l /= 2;
            r /= 2;
        }
        for leaf in [lo + self.size, hi - 1 + self.size] {
            let mut i = leaf / 2;
            while i >= 1 {
                self.sub[i] = self.sub[i].max(value);
                i /= 2;
            }
        }
    }

    pub fn query(&self, slot: usize) -> T {
        let mut i = slot + self.size;
        let mut res = self.bottom;
        while i >= 1 {
            res = res.max(self.tag[i]);
            i /= 2;
        }
        res
    }

    /// Maximum over the half-open slot range `lo..hi`.
    pub fn max(&self, lo: usize, hi: usize) -> T {
        if lo >= hi {
            return self.bottom;
        }
        let mut res = self.query(lo).max(self.query(hi - 1));
        let (mut l, mut r) = (lo + self.size, hi + self.size);
        while l < r {
            if l & 1 == 1 {
                res = res.max(self.sub[l]);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                res = res.max(self.sub[r]);
            }
            l /= 2;
            r /= 2;
        }
        res
    }
}

/// Prefix counts with point updates.
#[derive(Debug, Clone)]
pub struct Fenwick {
    tree: Vec<i64>,
}

impl Fenwick {
    pub fn new(n: usize) -> Self {
        Fenwick { tree: vec![0; n + 1] }
    }

    pub fn add(&mut self, slot: usize, delta: i64) {
        let mut i = slot + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    fn prefix(&self, end: usize) -> i64 {
        let mut i = end;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }

    /// Sum over the half-open range `lo..hi`.
    pub fn sum(&self, lo: usize, hi: usize) -> i64 {
        if hi <= lo {
            0
        } else {
            self.prefix(hi) - self.prefix(lo)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn range_max_matches_scan(ops in prop::collection::vec((0usize..40, 0i32..1000), 0..60),
                                  lo in 0usize..40, len in 0usize..40) {
            let mut tree = RangeMaxTree::new(40, i32::MIN);
            let mut naive = [i32::MIN; 40];
            for (slot, v) in ops {
                tree.raise(slot, v);
                naive[slot] = naive[slot].max(v);
            }
            let hi = (lo + len).min(40);
            let expect = naive[lo..hi].iter().copied().max().unwrap_or(i32::MIN);
            prop_assert_eq!(tree.max(lo, hi), expect);
        }

        #[test]
        fn stabbing_matches_scan(ops in prop::collection::vec((0usize..30, 0usize..30, 0i32..1000), 0..40),
                                 slot in 0usize..30) {
            let mut tree = StabbingMaxTree::new(30, -1);
            let mut naive = [-1; 30];
            for (a, b, v) in ops {
                let (lo, hi) = (a.min(b), a.max(b));
                tree.raise_range(lo, hi, v);
                for x in &mut naive[lo..hi] { *x = (*x).max(v); }
            }
            prop_assert_eq!(tree.query(slot), naive[slot]);
        }

        #[test]
        fn stabbing_range_max_matches_scan(ops in prop::collection::vec((0usize..30, 0usize..30, 0i32..1000), 0..40),
                                           a in 0usize..30, b in 0usize..31) {
            let mut tree = StabbingMaxTree::new(30, -1);
            let mut naive = [-1; 30];
            for (x, y, v) in ops {
                let (lo, hi) = (x.min(y), x.max(y));
                tree.raise_range(lo, hi, v);
                for z in &mut naive[lo..hi] { *z = (*z).max(v); }
            }
            let (lo, hi) = (a.min(b), a.max(b));
            let expect = naive[lo..hi].iter().copied().max().unwrap_or(-1);
            prop_assert_eq!(tree.max(lo, hi), expect);
        }

        #[test]
        fn fenwick_matches_scan(ops in prop::collection::vec((0usize..25, -5i64..5), 0..50),
                                lo in 0usize..25, hi in 0usize..26) {
            let mut f = Fenwick::new(25);
            let mut naive = [0i64; 25];
            for (s, d) in ops { f.add(s, d); naive[s] += d; }
            let expect: i64 = if hi > lo { naive[lo..hi].iter().sum() } else { 0 };
            prop_assert_eq!(f.sum(lo, hi), expect);
        }
    }
}
