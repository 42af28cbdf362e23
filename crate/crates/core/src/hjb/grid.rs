//! Regular tensor grids with multilinear interpolation.

use super::HjbError;

/// Highest grid dimension supported by the interpolation kernels.
pub const MAX_DIM: usize = 6;

/// Node values on a uniform grid over `[lower_1, upper_1] × … × [lower_ℓ, upper_ℓ]`.
///
/// Values are stored in lexicographic node order, last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueGrid {
    lower: Vec<f64>,
    upper: Vec<f64>,
    counts: Vec<usize>,
    spacing: Vec<f64>,
    strides: Vec<usize>,
    /// Offset of every cell corner relative to the cell's base node.
    corner_offsets: Vec<usize>,
    pub values: Vec<f64>,
}

impl ValueGrid {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, counts: Vec<usize>) -> Result<Self, HjbError> {
        let dim = counts.len();
        if dim == 0 || dim > MAX_DIM || lower.len() != dim || upper.len() != dim {
            return Err(HjbError::InvalidGrid(format!(
                "grid dimension {dim} must be in 1..={MAX_DIM} with matching bounds"
            )));
        }
        for d in 0..dim {
            if counts[d] < 2 {
                return Err(HjbError::InvalidGrid(format!(
                    "axis {d} needs at least 2 nodes"
                )));
            }
            if !(lower[d] < upper[d]) || !lower[d].is_finite() || !upper[d].is_finite() {
                return Err(HjbError::InvalidGrid(format!(
                    "axis {d} has empty range [{}, {}]",
                    lower[d], upper[d]
                )));
            }
        }
        let spacing = (0..dim)
            .map(|d| (upper[d] - lower[d]) / (counts[d] - 1) as f64)
            .collect();
        let mut strides = vec![1; dim];
        for d in (0..dim - 1).rev() {
            strides[d] = strides[d + 1] * counts[d + 1];
        }
        let total = strides[0] * counts[0];
        let corner_offsets = (0..1usize << dim)
            .map(|c| {
                (0..dim)
                    .filter(|d| c >> d & 1 == 1)
                    .map(|d| strides[d])
                    .sum()
            })
            .collect();
        Ok(Self {
            lower,
            upper,
            counts,
            spacing,
            strides,
            corner_offsets,
            values: vec![0.0; total],
        })
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    /// Multi-index of a flat node index.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for d in 0..self.dim() {
            idx[d] = flat / self.strides[d];
            flat %= self.strides[d];
        }
        idx
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(d, &i)| self.node_coordinate(d, i))
            .collect()
    }

    fn node_coordinate(&self, d: usize, i: usize) -> f64 {
        if i + 1 == self.counts[d] {
            self.upper[d]
        } else {
            self.lower[d] + i as f64 * self.spacing[d]
        }
    }

    /// Sets every node value from `f(node)`.
    pub fn fill(&mut self, f: impl Fn(&[f64]) -> f64) {
        for k in 0..self.len() {
            self.values[k] = f(&self.node(k));
        }
    }

    /// Clamps `point` into the box.
    pub fn clamp(&self, point: &mut [f64]) {
        for (d, x) in point.iter_mut().enumerate() {
            *x = x.clamp(self.lower[d], self.upper[d]);
        }
    }

    /// Multilinear interpolation of the stored values; coordinates outside the
    /// box are clamped to its boundary first.
    pub fn interpolate(&self, point: &[f64]) -> f64 {
        self.interpolate_values(&self.values, point)
    }

    /// Interpolates an arbitrary value array laid out on this grid.
    #[inline]
    pub fn interpolate_values(&self, values: &[f64], point: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        assert_eq!(point.len(), self.dim(), "point dimension mismatch");
        match self.dim() {
            1 => self.blend::<1>(values, point),
            2 => self.blend::<2>(values, point),
            3 => self.blend::<3>(values, point),
            4 => self.blend::<4>(values, point),
            5 => self.blend::<5>(values, point),
            6 => self.blend::<6>(values, point),
            _ => unreachable!("dimension checked at construction"),
        }
    }

    #[inline(always)]
    fn blend<const D: usize>(&self, values: &[f64], point: &[f64]) -> f64 {
        let mut base = 0;
        let mut t = [0.0; D];
        for d in 0..D {
            let x = point[d].clamp(self.lower[d], self.upper[d]);
            let mut s = (x - self.lower[d]) / self.spacing[d];
            let nearest = s.round();
            if (s - nearest).abs() < 1e-12 {
                s = nearest;
            }
            let cell = (s as usize).min(self.counts[d] - 2);
            t[d] = s - cell as f64;
            base += cell * self.strides[d];
        }
        let mut corners = [0.0; 64];
        let n = 1 << D;
        for c in 0..n {
            corners[c] = values[base + self.corner_offsets[c]];
        }
        // collapse the highest axis first: corners c and c + 2^d differ only on axis d
        let mut width = n;
        for d in (0..D).rev() {
            width >>= 1;
            let (lo, hi) = (1.0 - t[d], t[d]);
            for c in 0..width {
                corners[c] = lo * corners[c] + hi * corners[c + width];
            }
        }
        corners[0]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
