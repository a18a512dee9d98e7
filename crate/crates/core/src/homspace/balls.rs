use std::ops::Range;

/// Closed balls at realized radii, per center, in a deterministic order.
///
/// For each center the points are sorted by `(d(x, ·), index)`; the ball of
/// rank `k` is the prefix of that order holding every point within the `k`-th
/// smallest distinct distance. Tied distances share one rank. Balls are stored
/// flat: `offsets[x]..offsets[x + 1]` indexes the balls of center `x`.
#[derive(Debug, Clone)]
pub struct BallFamily {
    n: usize,
    order: Vec<u32>,
    rank_of: Vec<u32>,
    offsets: Vec<usize>,
    ends: Vec<u32>,
    radii: Vec<f64>,
    measures: Vec<f64>,
    class_of: Vec<u32>,
    class_measures: Vec<f64>,
}

/// A view of one realized ball.
#[derive(Debug, Clone, Copy)]
pub struct Ball<'a> {
    pub center: usize,
    pub rank: usize,
    /// Flat index into the family.
    pub index: usize,
    pub radius: f64,
    pub measure: f64,
    pub members: &'a [u32],
}

impl BallFamily {
    pub(crate) fn build(n: usize, dist: &[f64], weight: &[f64]) -> Self {
        let mut order = Vec::with_capacity(n * n);
        let mut rank_of = vec![0u32; n * n];
        let mut offsets = Vec::with_capacity(n + 1);
        let mut ends = Vec::new();
        let mut radii = Vec::new();
        let mut measures = Vec::new();
        let mut idx: Vec<u32> = (0..n as u32).collect();
        for x in 0..n {
            let row = &dist[x * n..(x + 1) * n];
            idx.sort_by(|&a, &b| {
                row[a as usize]
                    .total_cmp(&row[b as usize])
                    .then(a.cmp(&b))
            });
            offsets.push(ends.len());
            let base = order.len();
            order.extend_from_slice(&idx);
            let mut acc = 0.0;
            let mut rank = 0u32;
            for pos in 0..n {
                let y = idx[pos] as usize;
                acc += weight[y];
                rank_of[x * n + y] = rank;
                let last_of_shell =
                    pos + 1 == n || row[idx[pos + 1] as usize] != row[y];
                if last_of_shell {
                    ends.push((pos + 1) as u32);
                    radii.push(row[y]);
                    measures.push(acc);
                    rank += 1;
                }
            }
            debug_assert_eq!(order.len() - base, n);
        }
        offsets.push(ends.len());

        let mut class_measures = measures.clone();
        class_measures.sort_by(f64::total_cmp);
        class_measures.dedup();
        let class_of = measures
            .iter()
            .map(|m| {
                class_measures
                    .binary_search_by(|c| c.total_cmp(m))
                    .expect("measure present") as u32
            })
            .collect();
        Self {
            n,
            order,
            rank_of,
            offsets,
            ends,
            radii,
            measures,
            class_of,
            class_measures,
        }
    }

    /// Number of points of the underlying space.
    pub fn points(&self) -> usize {
        self.n
    }

    /// Total number of balls over all centers.
    pub fn len(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    pub fn n_ranks(&self, center: usize) -> usize {
        self.offsets[center + 1] - self.offsets[center]
    }

    /// Flat indices of the balls centered at `center`, smallest first.
    pub fn range(&self, center: usize) -> Range<usize> {
        self.offsets[center]..self.offsets[center + 1]
    }

    /// `(center, rank)` of a flat ball index.
    pub fn locate(&self, index: usize) -> (usize, usize) {
        assert!(index < self.len(), "ball index out of range");
        let center = self.offsets.partition_point(|&o| o <= index) - 1;
        (center, index - self.offsets[center])
    }

    /// Points sorted by distance from `center`.
    pub fn order_row(&self, center: usize) -> &[u32] {
        &self.order[center * self.n..(center + 1) * self.n]
    }

    /// Number of leading entries of `order_row(center)` belonging to ball `index`.
    #[inline]
    pub fn end(&self, index: usize) -> usize {
        self.ends[index] as usize
    }

    #[inline]
    pub fn radius(&self, index: usize) -> f64 {
        self.radii[index]
    }

    #[inline]
    pub fn measure(&self, index: usize) -> f64 {
        self.measures[index]
    }

    /// Balls sharing a bit-identical measure share a class; per-measure
    /// powers can then be computed once per class.
    #[inline]
    pub fn class_of(&self, index: usize) -> usize {
        self.class_of[index] as usize
    }

    pub fn class_measures(&self) -> &[f64] {
        &self.class_measures
    }

    pub fn ball(&self, center: usize, rank: usize) -> Ball<'_> {
        let index = self.offsets[center] + rank;
        assert!(index < self.offsets[center + 1], "rank out of range");
        Ball {
            center,
            rank,
            index,
            radius: self.radii[index],
            measure: self.measures[index],
            members: &self.order_row(center)[..self.end(index)],
        }
    }

    pub fn center_balls(&self, center: usize) -> impl Iterator<Item = Ball<'_>> + '_ {
        (0..self.n_ranks(center)).map(move |rank| self.ball(center, rank))
    }

    /// Every ball, centers in index order and radii ascending.
    pub fn iter(&self) -> impl Iterator<Item = Ball<'_>> + '_ {
        (0..self.n).flat_map(move |x| self.center_balls(x))
    }

    /// Rank of the smallest ball centered at `center` that contains `y`.
    #[inline]
    pub fn rank_of(&self, center: usize, y: usize) -> usize {
        self.rank_of[center * self.n + y] as usize
    }

    /// `μB(x, d(x, y))` for the closed ball.
    pub fn closed_measure(&self, x: usize, y: usize) -> f64 {
        self.measures[self.offsets[x] + self.rank_of(x, y)]
    }

    /// `μ{z : d(x, z) < d(x, y)}` for `y ≠ x`; for `y = x` the atom `μ{x}`,
    /// which is the measure of the smallest ball containing `x`.
    pub fn open_measure(&self, x: usize, y: usize) -> f64 {
        let rank = self.rank_of(x, y);
        if rank == 0 {
            self.measures[self.offsets[x]]
        } else {
            self.measures[self.offsets[x] + rank - 1]
        }
    }

    /// Flat index of the largest ball at `center` with radius `< r`, if any.
    pub fn last_below(&self, center: usize, r: f64) -> Option<usize> {
        let range = self.range(center);
        let k = self.radii[range.clone()].partition_point(|&rho| rho < r);
        (k > 0).then(|| range.start + k - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_collapse_into_one_rank() {
        // 3-point interval grid, center 1/2: both neighbours at distance 1/2
        let dist = vec![0.0, 0.5, 1.0, 0.5, 0.0, 0.5, 1.0, 0.5, 0.0];
        let fam = BallFamily::build(3, &dist, &[1.0 / 3.0; 3]);
        assert_eq!(fam.n_ranks(1), 2);
        let b0 = fam.ball(1, 0);
        assert_eq!(b0.members, &[1]);
        let b1 = fam.ball(1, 1);
        assert_eq!(b1.members, &[1, 0, 2]);
        assert!((b1.measure - 1.0).abs() < 1e-15);
        assert_eq!(fam.n_ranks(0), 3);
        assert_eq!(fam.rank_of(0, 2), 2);
        assert!((fam.open_measure(0, 2) - 2.0 / 3.0).abs() < 1e-15);
        assert!((fam.open_measure(0, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((fam.closed_measure(0, 1) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn measure_classes_are_shared() {
        let dist = vec![0.0, 1.0, 1.0, 0.0];
        let fam = BallFamily::build(2, &dist, &[0.5, 0.5]);
        assert_eq!(fam.len(), 4);
        assert_eq!(fam.class_measures(), &[0.5, 1.0]);
        assert_eq!(fam.class_of(0), fam.class_of(2));
        assert_eq!(fam.last_below(0, 1.0), Some(0));
        assert_eq!(fam.last_below(0, 0.0), None);
    }
}
