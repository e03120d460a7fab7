//! Joint system-detector dynamics on a grid in the detector coordinate `D`.
//!
//! The joint state is a density-valued X-state at every grid node. The
//! generator combines the node-local Liouvillian (hot bath coupled for
//! `D > 0`, decoupled for `D < 0`) with drift `-gamma d/dD A(D)` and
//! diffusion `gamma^2 / (8 lam) d^2/dD^2`. Drift uses first-order upwinding,
//! diffusion central differences, and both boundaries are closed.

use std::io;

use nalgebra::{Matrix6, Vector6, LU};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::generators::{bath_part, PARITY, build_free, build_hot_decoupled, energy_functional, GeneratorError, Liouvillian};
use crate::model::{Bath, Extended, FeedbackMode, ModelError, RateSet, SystemParams, XState};
use crate::ode::{DormandPrince, StepControl};
use crate::steady::SteadyError;

/// Default number of grid nodes.
pub const DEFAULT_POINTS: usize = 401;

/// Grids at least this large are applied in parallel.
const PARALLEL_NODES: usize = 1024;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Error)]
pub enum QfpmeError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("the joint equation needs a finite measurement strength")]
    ProjectiveLimit,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Steady(#[from] SteadyError),
    #[error("positivity lost at step {step} (t = {t}): population mass {min_population:e}")]
    StabilityFailure { step: usize, t: f64, min_population: f64 },
    #[error("trace drifted to {0}")]
    TraceDrift(f64),
    #[error("steady iteration stalled after {iterations} solves, residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("singular block in the joint solve")]
    Singular,
}

/// Uniform grid in `D`. Nodes sit at `d_min + j h` with
/// `h = (d_max - d_min) / (n - 1)`, shifted by `h / 2` if a node would land
/// on `D = 0`. Each node stands for the cell of width `h` around it.
#[derive(Debug, Clone, PartialEq)]
pub struct DGrid {
    d_min: f64,
    d_max: f64,
    n: usize,
    h: f64,
    offset: f64,
}

impl DGrid {
    pub fn new(d_min: f64, d_max: f64, n: usize) -> Result<DGrid, QfpmeError> {
        if !(d_min.is_finite() && d_max.is_finite()) || !(d_min < -1.0 && d_max > 1.0) {
            return Err(QfpmeError::InvalidGrid(format!("bounds [{d_min}, {d_max}] must enclose [-1, 1]")));
        }
        if n < 3 {
            return Err(QfpmeError::InvalidGrid(format!("need at least 3 nodes, got {n}")));
        }
        let h = (d_max - d_min) / (n - 1) as f64;
        let k = (-d_min / h).round();
        let offset = if k >= 0.0 && (d_min + k * h).abs() <= 1e-9 * h { 0.5 * h } else { 0.0 };
        Ok(DGrid { d_min, d_max, n, h, offset })
    }

    /// Bounds `-(1 + 6 sigma)` and `1 + 6 sigma` with `sigma^2 = gamma / (8 lam)`.
    pub fn for_params(params: &SystemParams, n: usize) -> Result<DGrid, QfpmeError> {
        let lam = match params.lam() {
            Extended::Finite(l) => l,
            Extended::Infinite => return Err(QfpmeError::ProjectiveLimit),
        };
        let sigma = (params.gamma_det() / (8.0 * lam)).sqrt();
        DGrid::new(-1.0 - 6.0 * sigma, 1.0 + 6.0 * sigma, n)
    }

    pub fn d_min(&self) -> f64 {
        self.d_min
    }

    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn node(&self, j: usize) -> f64 {
        self.d_min + j as f64 * self.h + self.offset
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }
}

/// Joint system-detector state: slice `j` is the density of the system
/// state at node `j`, so `sum_j h tr(slice_j) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub grid: DGrid,
    pub slices: Vec<XState>,
}

impl JointState {
    pub fn total_trace(&self) -> f64 {
        self.grid.h * self.slices.iter().map(XState::trace).sum::<f64>()
    }

    /// A state concentrated in the cell around node `j`.
    pub fn concentrated(grid: &DGrid, j: usize, state: &XState) -> JointState {
        let zero = XState { p00: 0.0, p01: 0.0, p10: 0.0, p11: 0.0, alpha: ZERO };
        let mut slices = vec![zero; grid.n];
        slices[j] = scaled(state, 1.0 / grid.h);
        JointState { grid: grid.clone(), slices }
    }

    /// Detector-resolved zeroth-order fast-detector state: each component
    /// carries the Gaussian centred on its parity eigenvalue with variance
    /// `gamma / (8 lam)`, renormalized on the grid.
    pub fn gaussian_mixture(grid: &DGrid, state: &XState, gamma_det: f64, lam: f64) -> JointState {
        let k = 4.0 * lam / gamma_det;
        let weights = |xi: f64| {
            let w: Vec<f64> = grid.nodes().iter().map(|d| (-k * (d - xi).powi(2)).exp()).collect();
            let norm = grid.h * w.iter().sum::<f64>();
            w.into_iter().map(move |x| x / norm).collect::<Vec<f64>>()
        };
        let (even, odd) = (weights(1.0), weights(-1.0));
        let slices = (0..grid.n)
            .map(|j| XState {
                p00: state.p00 * even[j],
                p01: state.p01 * odd[j],
                p10: state.p10 * odd[j],
                p11: state.p11 * even[j],
                alpha: state.alpha * odd[j],
            })
            .collect();
        JointState { grid: grid.clone(), slices }
    }

    fn to_flat(&self) -> Vec<Complex64> {
        self.slices.iter().flat_map(|s| s.vectorize().iter().copied().collect::<Vec<_>>()).collect()
    }

    fn from_flat(grid: &DGrid, flat: &[Complex64]) -> JointState {
        let slices = flat
            .chunks_exact(6)
            .map(|v| XState {
                p00: v[0].re,
                p01: v[1].re,
                p10: v[2].re,
                p11: v[3].re,
                alpha: (v[4] + v[5].conj()) * 0.5,
            })
            .collect();
        JointState { grid: grid.clone(), slices }
    }
}

fn scaled(s: &XState, f: f64) -> XState {
    XState { p00: s.p00 * f, p01: s.p01 * f, p10: s.p10 * f, p11: s.p11 * f, alpha: s.alpha * f }
}

/// Assembled joint generator. Acts on the flattened node-major vector.
#[derive(Debug, Clone)]
pub struct JointGenerator {
    grid: DGrid,
    /// Node-local Liouvillians: index 0 with the hot bath, 1 without.
    local: [Liouvillian; 2],
    branch: Vec<usize>,
    /// Transfer rates across face `k` (between nodes `k` and `k + 1`).
    right: Vec<[f64; 6]>,
    left: Vec<[f64; 6]>,
    diag: Vec<[f64; 6]>,
    hot: Liouvillian,
    energy: [Complex64; 6],
}

/// Assemble the joint generator. With `FeedbackMode::Off` the hot bath stays
/// coupled at every node; otherwise the node sign selects the Liouvillian.
pub fn build_joint_generator(params: &SystemParams, grid: &DGrid) -> Result<JointGenerator, QfpmeError> {
    let lam = match params.lam() {
        Extended::Finite(l) => l,
        Extended::Infinite => return Err(QfpmeError::ProjectiveLimit),
    };
    let gamma = params.gamma_det();
    let h = grid.h;
    let diffusion = gamma * gamma / (8.0 * lam) / (h * h);
    let n = grid.n;
    let mut right = vec![[0.0; 6]; n - 1];
    let mut left = vec![[0.0; 6]; n - 1];
    for k in 0..n - 1 {
        let face = grid.node(k) + 0.5 * h;
        for c in 0..6 {
            let v = gamma * (PARITY[c] - face);
            right[k][c] = v.max(0.0) / h + diffusion;
            left[k][c] = (-v).max(0.0) / h + diffusion;
        }
    }
    let diag = (0..n)
        .map(|j| {
            std::array::from_fn(|c| {
                let out_right = if j + 1 < n { right[j][c] } else { 0.0 };
                let out_left = if j > 0 { left[j - 1][c] } else { 0.0 };
                -(out_right + out_left)
            })
        })
        .collect();
    let feedback = params.feedback() != FeedbackMode::Off;
    let branch = grid.nodes().iter().map(|&d| usize::from(feedback && d < 0.0)).collect();
    let rates = RateSet::from_params(params);
    Ok(JointGenerator {
        grid: grid.clone(),
        local: [build_free(params).matrix, build_hot_decoupled(params).matrix],
        branch,
        right,
        left,
        diag,
        hot: bath_part(&rates, Bath::Hot),
        energy: energy_functional(params),
    })
}

impl JointGenerator {
    pub fn grid(&self) -> &DGrid {
        &self.grid
    }

    /// Largest rate magnitude in the operator.
    pub fn scale(&self) -> f64 {
        let transport = self.diag.iter().flatten().fold(0.0f64, |a, d| a.max(d.abs()));
        let local = self.local.iter().flat_map(|m| m.iter()).fold(0.0f64, |a, z| a.max(z.norm()));
        transport + local
    }

    /// `out = G x` on flattened vectors of length `6 n`.
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.grid.n;
        let node = |(j, o): (usize, &mut [Complex64])| {
            let xj = Vector6::from_column_slice(&x[6 * j..6 * j + 6]);
            let local = self.local[self.branch[j]] * xj;
            for c in 0..6 {
                let mut acc = local[c] + xj[c] * self.diag[j][c];
                if j > 0 {
                    acc += x[6 * (j - 1) + c] * self.right[j - 1][c];
                }
                if j + 1 < n {
                    acc += x[6 * (j + 1) + c] * self.left[j][c];
                }
                o[c] = acc;
            }
        };
        if n >= PARALLEL_NODES {
            out.par_chunks_mut(6).with_min_len(PARALLEL_NODES / 4).enumerate().for_each(node);
        } else {
            out.chunks_mut(6).enumerate().for_each(node);
        }
    }

    /// Heat current into the hot bath, accumulated over the nodes where the
    /// bath is coupled.
    pub fn hot_heat_current(&self, js: &JointState) -> f64 {
        let h = self.grid.h;
        js.slices
            .iter()
            .zip(&self.branch)
            .filter(|(_, &b)| b == 0)
            .map(|(s, _)| {
                let flow = self.hot * s.vectorize();
                -h * self.energy.iter().zip(flow.iter()).map(|(e, f)| e * f).sum::<Complex64>().re
            })
            .sum()
    }

    fn max_step(&self) -> f64 {
        let h = self.grid.h;
        let drift = self
            .right
            .iter()
            .zip(&self.left)
            .flat_map(|(r, l)| r.iter().zip(l))
            .fold(0.0f64, |a, (r, l)| a.max((r - l).abs() * h));
        let diffusion = self.right.iter().zip(&self.left).flat_map(|(r, l)| r.iter().zip(l)).fold(
            f64::INFINITY,
            |a, (r, l)| a.min(r.min(*l)),
        ) * h
            * h;
        let local = self
            .local
            .iter()
            .map(|m| (0..6).map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0f64, f64::max))
            .fold(0.0f64, f64::max);
        let mut cap = f64::INFINITY;
        if drift > 0.0 {
            cap = cap.min(h / drift);
        }
        if diffusion > 0.0 {
            cap = cap.min(h * h / (2.0 * diffusion));
        }
        if local > 0.0 {
            cap = cap.min(1.0 / local);
        }
        0.4 * cap
    }
}

/// Integrate the joint equation from `init` over `[0, t_max]` with adaptive
/// Dormand-Prince steps of local tolerance `tol`, capped by the drift,
/// diffusion and local-rate stability limits.
pub fn evolve_joint(
    params: &SystemParams,
    grid: &DGrid,
    init: &JointState,
    t_max: f64,
    tol: f64,
) -> Result<JointState, QfpmeError> {
    let gen = build_joint_generator(params, grid)?;
    evolve_with(&gen, init, t_max, tol)
}

/// As [`evolve_joint`] with a prebuilt generator.
pub fn evolve_with(gen: &JointGenerator, init: &JointState, t_max: f64, tol: f64) -> Result<JointState, QfpmeError> {
    let grid = &gen.grid;
    if init.grid != *grid {
        return Err(QfpmeError::InvalidGrid("initial state lives on a different grid".into()));
    }
    let trace0 = init.total_trace();
    if (trace0 - 1.0).abs() > 1e-6 {
        return Err(QfpmeError::TraceDrift(trace0));
    }
    let mut y = init.to_flat();
    let h_max = gen.max_step();
    let mut dp = DormandPrince::new(y.len(), StepControl { rtol: tol, atol: tol, h_max });
    let mut f = |x: &[Complex64], out: &mut [Complex64]| gen.apply(x, out);
    let (mut t, mut dt, mut step) = (0.0, h_max, 0usize);
    while t < t_max {
        let dt_try = dt.min(t_max - t);
        let (accepted, next) = dp.step(&mut f, &mut y, dt_try);
        dt = next;
        if !accepted {
            continue;
        }
        t += dt_try;
        step += 1;
        let min_population = y
            .chunks_exact(6)
            .flat_map(|v| v[..4].iter().map(|z| z.re))
            .fold(f64::INFINITY, f64::min)
            * grid.h;
        if min_population < -1e-6 {
            return Err(QfpmeError::StabilityFailure { step, t, min_population });
        }
    }
    let out = JointState::from_flat(grid, &y);
    let trace = out.total_trace();
    if (trace - 1.0).abs() > 1e-6 {
        return Err(QfpmeError::TraceDrift(trace));
    }
    Ok(out)
}

/// Block-tridiagonal factorization of `G + shift` (6x6 blocks, diagonal
/// off-diagonal blocks), eliminated top to bottom.
struct BlockFactor {
    lu: Vec<LU<Complex64, nalgebra::U6, nalgebra::U6>>,
    /// `A_j B'_{j-1}^{-1}` for the forward sweep.
    mult: Vec<Matrix6<Complex64>>,
    upper: Vec<[f64; 6]>,
}

impl BlockFactor {
    fn new(gen: &JointGenerator, shift: f64) -> Result<BlockFactor, QfpmeError> {
        let n = gen.grid.n;
        let block = |j: usize| {
            let mut b = gen.local[gen.branch[j]];
            for c in 0..6 {
                b[(c, c)] += gen.diag[j][c] + shift;
            }
            b
        };
        let mut lu = Vec::with_capacity(n);
        let mut mult = Vec::with_capacity(n);
        mult.push(Matrix6::zeros());
        let first = block(0).lu();
        lu.push(first);
        for j in 1..n {
            let prev = &lu[j - 1];
            // A_j = diag(right[j-1]), C_{j-1} = diag(left[j-1])
            let a = Matrix6::from_diagonal(&Vector6::from_fn(|c, _| Complex64::from(gen.right[j - 1][c])));
            let inv = prev.try_inverse().ok_or(QfpmeError::Singular)?;
            let m = a * inv;
            let mut b = block(j);
            for c in 0..6 {
                let col = m.column(c) * Complex64::from(gen.left[j - 1][c]);
                let mut bc = b.column_mut(c);
                bc -= col;
            }
            mult.push(m);
            lu.push(b.lu());
        }
        Ok(BlockFactor { lu, mult, upper: gen.left.clone() })
    }

    fn solve(&self, rhs: &mut [Complex64]) -> Result<(), QfpmeError> {
        let n = self.lu.len();
        let mut fwd: Vec<Vector6<Complex64>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut r = Vector6::from_column_slice(&rhs[6 * j..6 * j + 6]);
            if j > 0 {
                r -= self.mult[j] * fwd[j - 1];
            }
            fwd.push(r);
        }
        let mut next = Vector6::<Complex64>::zeros();
        for j in (0..n).rev() {
            let mut r = fwd[j];
            if j + 1 < n {
                for c in 0..6 {
                    r[c] -= next[c] * self.upper[j][c];
                }
            }
            let x = self.lu[j].solve(&r).ok_or(QfpmeError::Singular)?;
            rhs[6 * j..6 * j + 6].copy_from_slice(x.as_slice());
            next = x;
        }
        Ok(())
    }
}

/// Stationary joint state by shifted inverse iteration, seeded with the
/// Gaussian mixture of the fast-detector steady state.
pub fn steady_joint(params: &SystemParams, grid: &DGrid) -> Result<JointState, QfpmeError> {
    let gen = build_joint_generator(params, grid)?;
    let reduced = reduced_steady(params)?;
    let lam = params.lam().finite().ok_or(QfpmeError::ProjectiveLimit)?;
    let seed = JointState::gaussian_mixture(grid, &reduced, params.gamma_det(), lam);
    steady_from(&gen, &seed)
}

/// Steady state of the fast-detector reduction for the same parameters,
/// falling back to the free generator when feedback is off.
pub fn reduced_steady(params: &SystemParams) -> Result<XState, QfpmeError> {
    let gen = match params.feedback() {
        FeedbackMode::Off => build_free(params),
        _ => crate::generators::build_feedback_general(params)?,
    };
    Ok(crate::steady::steady_state(&gen)?)
}

/// Inverse iteration towards the kernel of `gen`, starting from `start`.
/// With a degenerate kernel the result is the component reached from
/// `start`.
pub fn steady_from(gen: &JointGenerator, start: &JointState) -> Result<JointState, QfpmeError> {
    let grid = &gen.grid;
    let scale = gen.scale();
    let factor = BlockFactor::new(gen, 1e-11 * scale)?;
    let mut x = start.to_flat();
    let mut gx = vec![ZERO; x.len()];
    let mut residual = f64::INFINITY;
    for iteration in 1..=40 {
        factor.solve(&mut x)?;
        let trace = grid.h * x.chunks_exact(6).map(|v| (v[0] + v[1] + v[2] + v[3]).re).sum::<f64>();
        if !(trace.abs() > 0.0) || !trace.is_finite() {
            return Err(QfpmeError::Singular);
        }
        x.iter_mut().for_each(|z| *z /= trace);
        gen.apply(&x, &mut gx);
        let size = x.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        residual = gx.iter().fold(0.0f64, |a, z| a.max(z.norm())) / (scale * size);
        if residual <= 1e-12 && iteration >= 2 {
            return Ok(JointState::from_flat(grid, &x));
        }
    }
    Err(QfpmeError::NotConverged { iterations: 40, residual })
}

/// System state `int dD rho(D)` by the trapezoidal rule.
pub fn marginal_system(js: &JointState) -> XState {
    let h = js.grid.h;
    let n = js.slices.len();
    let mut acc = XState { p00: 0.0, p01: 0.0, p10: 0.0, p11: 0.0, alpha: ZERO };
    for (j, s) in js.slices.iter().enumerate() {
        let w = if j == 0 || j + 1 == n { 0.5 * h } else { h };
        acc.p00 += w * s.p00;
        acc.p01 += w * s.p01;
        acc.p10 += w * s.p10;
        acc.p11 += w * s.p11;
        acc.alpha += s.alpha * w;
    }
    acc
}

/// Detector density `p(D_j) = tr rho(D_j)` at the grid nodes.
pub fn marginal_detector(js: &JointState) -> Vec<f64> {
    js.slices.iter().map(XState::trace).collect()
}

/// Peak locations and lobe weights of the detector density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorLobes {
    pub negative_peak: f64,
    pub positive_peak: f64,
    pub negative_weight: f64,
    pub positive_weight: f64,
}

pub fn detector_lobes(js: &JointState) -> DetectorLobes {
    let p = marginal_detector(js);
    let nodes = js.grid.nodes();
    let h = js.grid.h;
    let mut lobes = DetectorLobes { negative_peak: f64::NAN, positive_peak: f64::NAN, negative_weight: 0.0, positive_weight: 0.0 };
    let (mut best_neg, mut best_pos) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (d, pj) in nodes.iter().zip(&p) {
        if *d < 0.0 {
            lobes.negative_weight += h * pj;
            if *pj > best_neg {
                best_neg = *pj;
                lobes.negative_peak = *d;
            }
        } else {
            lobes.positive_weight += h * pj;
            if *pj > best_pos {
                best_pos = *pj;
                lobes.positive_peak = *d;
            }
        }
    }
    lobes
}

/// Write `D, p, p00, p01, p10, p11, re_alpha, im_alpha` per node.
pub fn write_detector_csv<W: io::Write>(js: &JointState, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["D", "p", "p00", "p01", "p10", "p11", "re_alpha", "im_alpha"])?;
    for (d, s) in js.grid.nodes().iter().zip(&js.slices) {
        let row = [*d, s.trace(), s.p00, s.p01, s.p10, s.p11, s.alpha.re, s.alpha.im];
        w.write_record(row.iter().map(|x| format!("{x:.11e}")))?;
    }
    w.flush()?;
    Ok(())
}
