//! Quadratic-form representation of the weighted-centroid estimate.

use nalgebra::{DMatrix, SMatrix};

use super::moments::{Mat12, Vec12};
use crate::{Error, Point, Result};

pub type Vec6 = nalgebra::SVector<f64, 6>;

/// `p_k = [p_t, p_i, √(p_t p_i), 1, √p_t, √p_i]` in linear units.
pub fn build_power_vector(p_tk: f64, p_ik: f64) -> Result<Vec6> {
    if p_tk < 0.0 || p_ik < 0.0 || p_tk.is_nan() || p_ik.is_nan() {
        return Err(Error::NegativePower(if p_tk < 0.0 || p_tk.is_nan() { p_tk } else { p_ik }));
    }
    Ok(Vec6::from([p_tk, p_ik, (p_tk * p_ik).sqrt(), 1.0, p_tk.sqrt(), p_ik.sqrt()]))
}

/// `diag(M, M)` for a 6×6 block.
pub fn block_diag(m: &SMatrix<f64, 6, 6>) -> Mat12 {
    let mut out = Mat12::zeros();
    out.fixed_view_mut::<6, 6>(0, 0).copy_from(m);
    out.fixed_view_mut::<6, 6>(6, 6).copy_from(m);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadFormSet {
    pub a_x: Mat12,
    pub a_y: Mat12,
    pub b: Mat12,
    /// 6×K matrix whose columns are the power vectors.
    pub p: DMatrix<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub s0: Vec<bool>,
}

impl QuadFormSet {
    /// `(θᵀA_xθ / θᵀBθ, θᵀA_yθ / θᵀBθ)`.
    pub fn ratio(&self, theta: &Vec12) -> Result<(f64, f64)> {
        let den = theta.dot(&(self.b * theta));
        if den == 0.0 {
            return Err(Error::AllZeroWeights);
        }
        Ok((theta.dot(&(self.a_x * theta)) / den, theta.dot(&(self.a_y * theta)) / den))
    }
}

/// Builds `A_x`, `A_y` and `B` with CRs restricted to `s0` (all `true` for
/// plain Cyclic WCL).
pub fn build_quadforms(p_t: &[f64], p_i: &[f64], locs: &[Point], s0: &[bool]) -> Result<QuadFormSet> {
    let k = locs.len();
    if k == 0 {
        return Err(Error::InvalidArgument("at least one CR is required".into()));
    }
    for len in [p_t.len(), p_i.len(), s0.len()] {
        if len != k {
            return Err(Error::LengthMismatch { left: k, right: len });
        }
    }
    if !s0.iter().any(|&s| s) {
        return Err(Error::InvalidArgument("selection matrix has no CR selected".into()));
    }
    let mut p = DMatrix::zeros(6, k);
    let mut ax = SMatrix::<f64, 6, 6>::zeros();
    let mut ay = SMatrix::<f64, 6, 6>::zeros();
    let mut b = SMatrix::<f64, 6, 6>::zeros();
    for j in 0..k {
        let pk = build_power_vector(p_t[j], p_i[j])?;
        p.set_column(j, &pk);
        if s0[j] {
            let outer = pk * pk.transpose();
            ax += outer * locs[j].x;
            ay += outer * locs[j].y;
            b += outer;
        }
    }
    Ok(QuadFormSet {
        a_x: block_diag(&ax),
        a_y: block_diag(&ay),
        b: block_diag(&b),
        p,
        x: locs.iter().map(|l| l.x).collect(),
        y: locs.iter().map(|l| l.y).collect(),
        s0: s0.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_vector_examples() {
        assert_eq!(build_power_vector(1.0, 0.0).unwrap().as_slice(), &[1.0, 0.0, 0.0, 1.0, 1.0, 0.0]);
        assert_eq!(build_power_vector(4.0, 9.0).unwrap().as_slice(), &[4.0, 9.0, 6.0, 1.0, 2.0, 3.0]);
        assert_eq!(build_power_vector(0.0, 0.0).unwrap().as_slice(), &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(build_power_vector(-1.0, 0.0).is_err());
    }

    #[test]
    fn single_cr_denominator_rank() {
        let q = build_quadforms(&[2.0], &[0.5], &[Point::new(1.0, 2.0)], &[true]).unwrap();
        let rank = q.b.rank(1e-12 * q.b.norm());
        assert!(rank <= 2);
        assert!(build_quadforms(&[2.0], &[0.5], &[Point::new(1.0, 2.0)], &[false]).is_err());
    }
}
