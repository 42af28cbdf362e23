use super::HjbError;

/// Finite control set `U = {u_1, …, u_M} ⊂ ℝᵐ`; scalar sets are kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSet {
    input_dim: usize,
    points: Vec<Vec<f64>>,
}

impl ControlSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, HjbError> {
        let input_dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| HjbError::InvalidControls("control set is empty".into()))?;
        if input_dim == 0 || points.iter().any(|p| p.len() != input_dim) {
            return Err(HjbError::InvalidControls(
                "controls must share one nonzero dimension".into(),
            ));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(HjbError::InvalidControls("controls must be finite".into()));
        }
        let mut points = points;
        if input_dim == 1 {
            points.sort_by(|a, b| a[0].total_cmp(&b[0]));
        }
        Ok(Self { input_dim, points })
    }

    /// `count` equidistant scalar controls on `[min, max]`.
    pub fn uniform(min: f64, max: f64, count: usize) -> Result<Self, HjbError> {
        if count == 0 || !(min <= max) || (count > 1 && min == max) {
            return Err(HjbError::InvalidControls(format!(
                "cannot place {count} controls on [{min}, {max}]"
            )));
        }
        if count == 1 {
            return Self::new(vec![vec![min]]);
        }
        let step = (max - min) / (count - 1) as f64;
        Self::new(
            (0..count)
                .map(|k| {
                    vec![if k + 1 == count {
                        max
                    } else {
                        min + k as f64 * step
                    }]
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn get(&self, k: usize) -> &[f64] {
        &self.points[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.iter().map(Vec::as_slice)
    }
}
