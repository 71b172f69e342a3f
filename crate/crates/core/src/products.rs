//! Bilinear forms of the MRC/MRT relay matrix `F = conj(G_RD_hat) G_SR_hat^H`
//! evaluated through `K x K` Gram matrices, so the `M x M` matrix is never built.
//!
//! With `P = G_RD^T conj(G_RD_hat)` the row `g_RD,k^T F` equals `P_k G_SR_hat^H`,
//! which turns every quantity below into a `K`-dimensional quadratic form.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{draw_loop_column, CMatrix, ChannelEstimate, ChannelSet};
use crate::error::{Error, Result};

/// Sufficient statistics of the loop channel seen through `G_SR_hat^H`:
/// `W W^H` with `W = G_SR_hat^H G_RR`, and the squared row norms of `G_RR`.
#[derive(Debug, Clone)]
pub struct LoopSummary {
    pub ww: CMatrix,
    pub row_energy: Vec<f64>,
}

impl LoopSummary {
    pub fn from_matrix(g_rr: &CMatrix, g_sr_hat: &CMatrix) -> Result<Self> {
        let m = g_sr_hat.nrows();
        if g_rr.shape() != (m, m) {
            return Err(Error::DimensionMismatch {
                expected: m * m,
                actual: g_rr.len(),
            });
        }
        let mut acc = Accumulator::new(g_sr_hat);
        for col in g_rr.column_iter() {
            acc.push(col.as_slice());
        }
        Ok(acc.finish())
    }

    /// Draws a unit-variance `G_RR` column by column from `rng` and summarizes it
    /// on the fly. Consumes the stream exactly like the loop part of
    /// [`crate::channel::draw_channels`].
    pub fn stream<R: Rng + ?Sized>(g_sr_hat: &CMatrix, rng: &mut R) -> Self {
        let m = g_sr_hat.nrows();
        let mut acc = Accumulator::new(g_sr_hat);
        let mut col = vec![Complex64::default(); m];
        for _ in 0..m {
            draw_loop_column(rng, &mut col);
            acc.push(&col);
        }
        acc.finish()
    }
}

struct Accumulator<'a> {
    g_hat: &'a CMatrix,
    ww: CMatrix,
    row_energy: Vec<f64>,
    w: Vec<Complex64>,
}

impl<'a> Accumulator<'a> {
    fn new(g_hat: &'a CMatrix) -> Self {
        let k = g_hat.ncols();
        Self {
            g_hat,
            ww: CMatrix::zeros(k, k),
            row_energy: vec![0.0; g_hat.nrows()],
            w: vec![Complex64::default(); k],
        }
    }

    fn push(&mut self, col: &[Complex64]) {
        for (e, z) in self.row_energy.iter_mut().zip(col) {
            *e += z.norm_sqr();
        }
        for (n, w) in self.w.iter_mut().enumerate() {
            let (mut re, mut im) = (0.0, 0.0);
            for (g, z) in self.g_hat.column(n).iter().zip(col) {
                // conj(g) * z
                re += g.re * z.re + g.im * z.im;
                im += g.re * z.im - g.im * z.re;
            }
            *w = Complex64::new(re, im);
        }
        let k = self.w.len();
        for j in 0..k {
            let wj = self.w[j].conj();
            for i in 0..k {
                self.ww[(i, j)] += self.w[i] * wj;
            }
        }
    }

    fn finish(self) -> LoopSummary {
        LoopSummary {
            ww: self.ww,
            row_energy: self.row_energy,
        }
    }
}

/// Factorized evaluator for the MRC/MRT relay matrix of one realization.
#[derive(Debug, Clone)]
pub struct RelayProducts {
    p: CMatrix,
    pq: CMatrix,
    s: CMatrix,
    t: CMatrix,
    qq: CMatrix,
    ww: CMatrix,
    s_src: CMatrix,
    s_loop: CMatrix,
}

/// `G^H diag(w) G`.
fn weighted_gram(g: &CMatrix, w: &[f64]) -> CMatrix {
    let k = g.ncols();
    let mut out = CMatrix::zeros(k, k);
    for j in 0..k {
        for i in 0..=j {
            let v: Complex64 = g
                .column(i)
                .iter()
                .zip(g.column(j).iter())
                .zip(w)
                .map(|((a, b), &wm)| a.conj() * b * wm)
                .sum();
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    out
}

/// `x A x^H` for a row vector `x` and Hermitian `A`.
fn quad(p: &CMatrix, row: usize, a: &CMatrix) -> f64 {
    let k = a.nrows();
    let mut acc = 0.0;
    for j in 0..k {
        let xj = p[(row, j)].conj();
        for i in 0..k {
            acc += (p[(row, i)] * a[(i, j)] * xj).re;
        }
    }
    acc
}

/// `Re tr(T A)`.
fn trace_product(t: &CMatrix, a: &CMatrix) -> f64 {
    let k = t.nrows();
    let mut acc = 0.0;
    for i in 0..k {
        for j in 0..k {
            acc += (t[(i, j)] * a[(j, i)]).re;
        }
    }
    acc
}

impl RelayProducts {
    /// Builds the evaluator from a dense channel set.
    pub fn new(est: &ChannelEstimate, channels: &ChannelSet) -> Result<Self> {
        let summary = LoopSummary::from_matrix(&channels.g_rr, &est.g_sr_hat)?;
        Self::from_parts(est, &channels.g_sr, &channels.g_rd, summary)
    }

    /// Builds the evaluator from the two user links and an already summarized
    /// loop channel.
    pub fn from_parts(
        est: &ChannelEstimate,
        g_sr: &CMatrix,
        g_rd: &CMatrix,
        summary: LoopSummary,
    ) -> Result<Self> {
        let shape = est.g_sr_hat.shape();
        for g in [&est.g_rd_hat, g_sr, g_rd] {
            if g.shape() != shape {
                return Err(Error::DimensionMismatch {
                    expected: shape.0 * shape.1,
                    actual: g.len(),
                });
            }
        }
        if summary.row_energy.len() != shape.0 || summary.ww.shape() != (shape.1, shape.1) {
            return Err(Error::DimensionMismatch {
                expected: shape.0,
                actual: summary.row_energy.len(),
            });
        }
        let gs = &est.g_sr_hat;
        let gd_conj = est.g_rd_hat.map(|z| z.conj());
        let p = g_rd.transpose() * &gd_conj;
        let q = gs.adjoint() * g_sr;
        let s = gs.adjoint() * gs;
        let t = est.g_rd_hat.transpose() * &gd_conj;
        let qq = &q * q.adjoint();
        let src_energy: Vec<f64> = g_sr.row_iter().map(|r| r.norm_squared()).collect();
        Ok(Self {
            pq: &p * &q,
            p,
            s,
            t,
            qq,
            s_src: weighted_gram(gs, &src_energy),
            s_loop: weighted_gram(gs, &summary.row_energy),
            ww: summary.ww,
        })
    }

    pub fn pairs(&self) -> usize {
        self.p.nrows()
    }

    /// `g_RD,k^T F g_SR,j`.
    pub fn cross(&self, k: usize, j: usize) -> Complex64 {
        self.pq[(k, j)]
    }

    /// `||g_RD,k^T F||^2`.
    pub fn row_energy(&self, k: usize) -> f64 {
        quad(&self.p, k, &self.s)
    }

    /// `||g_RD,k^T F G_SR||^2`.
    pub fn row_through_sources(&self, k: usize) -> f64 {
        quad(&self.p, k, &self.qq)
    }

    /// `||g_RD,k^T F G_RR||^2`.
    pub fn row_through_loop(&self, k: usize) -> f64 {
        quad(&self.p, k, &self.ww)
    }

    /// `sum_m |[g_RD,k^T F]_m|^2 ||[G_SR]_m||^2`.
    pub fn row_weighted_sources(&self, k: usize) -> f64 {
        quad(&self.p, k, &self.s_src)
    }

    /// `sum_m |[g_RD,k^T F]_m|^2 ||[G_RR]_m||^2`.
    pub fn row_weighted_loop(&self, k: usize) -> f64 {
        quad(&self.p, k, &self.s_loop)
    }

    /// `||F||^2`.
    pub fn frobenius(&self) -> f64 {
        trace_product(&self.t, &self.s)
    }

    /// `||F G_SR||^2`.
    pub fn frobenius_sources(&self) -> f64 {
        trace_product(&self.t, &self.qq)
    }

    /// `||F G_RR||^2`.
    pub fn frobenius_loop(&self) -> f64 {
        trace_product(&self.t, &self.ww)
    }

    /// `sum_m ||F e_m||^2 ||[G_SR]_m||^2`.
    pub fn frobenius_weighted_sources(&self) -> f64 {
        trace_product(&self.t, &self.s_src)
    }

    /// `sum_m ||F e_m||^2 ||[G_RR]_m||^2`.
    pub fn frobenius_weighted_loop(&self) -> f64 {
        trace_product(&self.t, &self.s_loop)
    }
}

/// Dense reference implementation used by the tests; materializes `F`.
#[doc(hidden)]
pub mod dense {
    use super::*;

    pub struct DenseProducts {
        pub f: CMatrix,
        pub g_sr: CMatrix,
        pub g_rd: CMatrix,
        pub g_rr: CMatrix,
    }

    impl DenseProducts {
        pub fn new(est: &ChannelEstimate, ch: &ChannelSet) -> Self {
            Self {
                f: est.g_rd_hat.map(|z| z.conj()) * est.g_sr_hat.adjoint(),
                g_sr: ch.g_sr.clone(),
                g_rd: ch.g_rd.clone(),
                g_rr: ch.g_rr.clone(),
            }
        }

        fn row(&self, k: usize) -> nalgebra::RowDVector<Complex64> {
            self.g_rd.column(k).transpose() * &self.f
        }

        pub fn cross(&self, k: usize, j: usize) -> Complex64 {
            (self.row(k) * self.g_sr.column(j))[(0, 0)]
        }

        pub fn row_energy(&self, k: usize) -> f64 {
            self.row(k).norm_squared()
        }

        pub fn row_through_sources(&self, k: usize) -> f64 {
            (self.row(k) * &self.g_sr).norm_squared()
        }

        pub fn row_through_loop(&self, k: usize) -> f64 {
            (self.row(k) * &self.g_rr).norm_squared()
        }

        fn weights(g: &CMatrix) -> Vec<f64> {
            g.row_iter().map(|r| r.norm_squared()).collect()
        }

        pub fn row_weighted_sources(&self, k: usize) -> f64 {
            let u = self.row(k);
            u.iter()
                .zip(Self::weights(&self.g_sr))
                .map(|(z, w)| z.norm_sqr() * w)
                .sum()
        }

        pub fn row_weighted_loop(&self, k: usize) -> f64 {
            let u = self.row(k);
            u.iter()
                .zip(Self::weights(&self.g_rr))
                .map(|(z, w)| z.norm_sqr() * w)
                .sum()
        }

        pub fn frobenius(&self) -> f64 {
            self.f.norm_squared()
        }

        pub fn frobenius_sources(&self) -> f64 {
            (&self.f * &self.g_sr).norm_squared()
        }

        pub fn frobenius_loop(&self) -> f64 {
            (&self.f * &self.g_rr).norm_squared()
        }

        pub fn frobenius_weighted_sources(&self) -> f64 {
            let w = Self::weights(&self.g_sr);
            self.f
                .column_iter()
                .zip(w)
                .map(|(c, w)| c.norm_squared() * w)
                .sum()
        }

        pub fn frobenius_weighted_loop(&self) -> f64 {
            let w = Self::weights(&self.g_rr);
            self.f
                .column_iter()
                .zip(w)
                .map(|(c, w)| c.norm_squared() * w)
                .sum()
        }
    }
}
