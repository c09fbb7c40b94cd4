use crate::error::{Error, Result};
use crate::scalar::Real;

/// Labelled `(t, value)` samples with strictly ascending `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T: Real> {
    times: Vec<T>,
    values: Vec<T>,
    label: String,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(label: impl Into<String>, times: Vec<T>, values: Vec<T>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Shape(format!("{} times but {} values", times.len(), values.len())));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::param("times", "must be strictly ascending"));
        }
        if values.iter().chain(&times).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { times, values, label: label.into() })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max |self - other|` over a shared time axis.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.times != other.times {
            return Err(Error::param("times", "series are sampled on different grids"));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (*a - *b).abs()).fold(T::zero(), T::max))
    }

    /// True when every step is non-increasing.
    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }
}

/// `n + 1` evenly spaced points on `[0, t_max]`.
pub fn uniform_grid<T: Real>(t_max: T, steps: usize) -> Vec<T> {
    let h = t_max / T::of_usize(steps.max(1));
    (0..=steps).map(|k| T::of_usize(k) * h).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_shape_and_order() {
        assert!(TimeSeries::new("x", vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(TimeSeries::new("x", vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(TimeSeries::new("x", vec![0.0, 1.0], vec![1.0, f64::NAN]).is_err());
        let s = TimeSeries::new("x", vec![0.0, 1.0], vec![2.0, 1.0]).unwrap();
        assert!(s.is_non_increasing());
        assert_eq!(s.label(), "x");
    }

    #[test]
    fn uniform_grid_endpoints() {
        let g = uniform_grid(5.0f64, 10);
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[10], 5.0);
    }
}
