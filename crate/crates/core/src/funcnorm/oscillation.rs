//! Mean and median oscillation of a function over every realized ball.
//!
//! Per center, balls grow along the distance order; each new member is
//! inserted into a Fenwick tree indexed by the value rank, which answers
//! "weight and weighted sum of values ≤ t" and weighted-median queries in
//! `O(log N)`. All balls of all centers cost `O(N² log N)`.

use crate::homspace::DiscreteHomSpace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillation {
    /// `b_B`.
    pub mean: f64,
    /// `avg_B |b − b_B|`.
    pub about_mean: f64,
    /// Lower weighted median of `b` on `B`.
    pub median: f64,
    /// `avg_B |b − median| = min_c avg_B |b − c|`.
    pub about_median: f64,
}

struct Fenwick {
    w: Vec<f64>,
    s: Vec<f64>,
    top: usize,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        let top = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        Self {
            w: vec![0.0; n + 1],
            s: vec![0.0; n + 1],
            top,
        }
    }

    fn clear(&mut self) {
        self.w.fill(0.0);
        self.s.fill(0.0);
    }

    fn add(&mut self, pos: usize, w: f64, s: f64) {
        let mut i = pos + 1;
        while i < self.w.len() {
            self.w[i] += w;
            self.s[i] += s;
            i += i & i.wrapping_neg();
        }
    }

    /// Weight and weighted sum over positions `< k`.
    fn prefix(&self, k: usize) -> (f64, f64) {
        let (mut w, mut s) = (0.0, 0.0);
        let mut i = k;
        while i > 0 {
            w += self.w[i];
            s += self.s[i];
            i &= i - 1;
        }
        (w, s)
    }

    /// Smallest position whose inclusive prefix weight reaches `target`.
    fn lower_bound(&self, target: f64) -> usize {
        let n = self.w.len() - 1;
        let mut pos = 0;
        let mut rem = target;
        let mut step = self.top;
        while step > 0 {
            let next = pos + step;
            if next <= n && self.w[next] < rem {
                pos = next;
                rem -= self.w[next];
            }
            step >>= 1;
        }
        pos.min(n - 1)
    }
}

/// Calls `visit(center, flat_ball_index, oscillation)` for every realized ball.
pub(crate) fn for_each_ball(
    space: &DiscreteHomSpace,
    values: &[f64],
    mut visit: impl FnMut(usize, usize, Oscillation),
) {
    let n = space.len();
    let weight = space.weights();
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut pos_of = vec![0usize; n];
    for (k, &i) in sorted.iter().enumerate() {
        pos_of[i] = k;
    }
    let sorted_vals: Vec<f64> = sorted.iter().map(|&i| values[i]).collect();
    let fam = space.balls();
    let mut tree = Fenwick::new(n);
    for x in 0..n {
        tree.clear();
        let row = fam.order_row(x);
        let (mut w_tot, mut s_tot) = (0.0, 0.0);
        let mut filled = 0;
        for b in fam.range(x) {
            let end = fam.end(b);
            while filled < end {
                let y = row[filled] as usize;
                tree.add(pos_of[y], weight[y], weight[y] * values[y]);
                w_tot += weight[y];
                s_tot += weight[y] * values[y];
                filled += 1;
            }
            let about = |c: f64, k: usize| {
                let (w_le, s_le) = tree.prefix(k);
                let dev = (c * w_le - s_le) + ((s_tot - s_le) - c * (w_tot - w_le));
                (dev / w_tot).max(0.0)
            };
            let mean = s_tot / w_tot;
            let about_mean = about(mean, sorted_vals.partition_point(|&v| v <= mean));
            let k = tree.lower_bound(0.5 * w_tot);
            let median = sorted_vals[k];
            let about_median = about(median, k + 1);
            visit(
                x,
                b,
                Oscillation {
                    mean,
                    about_mean,
                    median,
                    about_median,
                },
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homspace::Geometry;

    #[test]
    fn fenwick_queries() {
        let mut t = Fenwick::new(5);
        for (i, w) in [1.0, 2.0, 0.0, 3.0, 1.0].iter().enumerate() {
            t.add(i, *w, *w * i as f64);
        }
        assert_eq!(t.prefix(2), (3.0, 2.0));
        assert_eq!(t.lower_bound(0.5), 0);
        assert_eq!(t.lower_bound(3.0), 1);
        assert_eq!(t.lower_bound(3.5), 3);
        assert_eq!(t.lower_bound(7.0), 4);
    }

    #[test]
    fn two_atoms_full_ball() {
        let s = DiscreteHomSpace::uniform_grid(2, 1, Geometry::Interval).unwrap();
        let mut got = Vec::new();
        for_each_ball(&s, &[0.0, 1.0], |_, _, o| got.push(o));
        let full = got.iter().find(|o| (o.mean - 0.5).abs() < 1e-15).unwrap();
        assert!((full.about_mean - 0.5).abs() < 1e-15);
        assert!((full.about_median - 0.5).abs() < 1e-15);
        assert_eq!(full.median, 0.0);
    }
}
