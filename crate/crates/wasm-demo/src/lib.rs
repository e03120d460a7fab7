//! Browser bindings: a concurrence heatmap over `(g, T_H)`, a single
//! steady-state query and the detector density of the joint equation.
//!
//! Everything runs on one thread; grid points are evaluated in order.

use qtm_core::qfpme::{self, DGrid};
use qtm_core::sweep::{evaluate_point, Axis, Engine, Param, Scale};
use qtm_core::{BathStatistics, Extended, FeedbackMode, SystemParams};
use wasm_bindgen::prelude::*;

/// Largest heatmap side and detector grid accepted from the page.
pub const MAX_SIDE: usize = 128;
pub const MAX_POINTS: usize = 801;

#[wasm_bindgen]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemoParams {
    pub g: f64,
    /// Negative means infinite.
    pub u: f64,
    pub gamma_c: f64,
    pub gamma_h: f64,
    pub t_c: f64,
    pub t_h: f64,
    pub gamma_det: f64,
    /// Negative means infinite.
    pub lam: f64,
    pub bosonic: bool,
    feedback: FeedbackMode,
}

#[wasm_bindgen]
impl DemoParams {
    /// Defaults of the `(g, T_H)` heatmap.
    #[wasm_bindgen(constructor)]
    pub fn new() -> DemoParams {
        DemoParams {
            g: 3.5e-4,
            u: 100.0,
            gamma_c: 1e-3,
            gamma_h: 0.1,
            t_c: 0.01,
            t_h: 1.0,
            gamma_det: 1.0,
            lam: 100.0,
            bosonic: false,
            feedback: FeedbackMode::General,
        }
    }

    /// One of `off`, `general`, `ideal`, `u_inf`.
    pub fn set_feedback(&mut self, mode: &str) -> Result<(), JsError> {
        self.feedback = match mode {
            "off" => FeedbackMode::Off,
            "general" => FeedbackMode::General,
            "ideal" => FeedbackMode::Ideal,
            "u_inf" => FeedbackMode::UInfinite,
            other => return Err(JsError::new(&format!("unknown feedback mode `{other}`"))),
        };
        Ok(())
    }
}

impl Default for DemoParams {
    fn default() -> Self {
        DemoParams::new()
    }
}

fn extended(v: f64) -> Extended {
    if v < 0.0 {
        Extended::Infinite
    } else {
        Extended::Finite(v)
    }
}

impl DemoParams {
    pub fn to_params(&self) -> Result<SystemParams, String> {
        let (t_c, lam) = match self.feedback {
            FeedbackMode::Ideal => (0.0, Extended::Infinite),
            _ => (self.t_c, extended(self.lam)),
        };
        SystemParams::builder()
            .g(self.g)
            .u(extended(self.u))
            .gamma_c(self.gamma_c)
            .gamma_h(self.gamma_h)
            .t_c(t_c)
            .t_h(self.t_h)
            .gamma_det(self.gamma_det)
            .lam(lam)
            .statistics(if self.bosonic { BathStatistics::Bosonic } else { BathStatistics::Fermionic })
            .feedback(self.feedback)
            .build()
            .map_err(|e| e.to_string())
    }
}

/// Concurrence on a `side x side` log grid in `g` (columns) and `T_H`
/// (rows), row-major; failed points are NaN.
pub fn heatmap(base: &DemoParams, side: usize, g: (f64, f64), t_h: (f64, f64)) -> Result<Vec<f64>, String> {
    if !(2..=MAX_SIDE).contains(&side) {
        return Err(format!("side must be in 2..={MAX_SIDE}"));
    }
    let params = DemoParams { t_h: t_h.0.max(t_h.1), ..*base }.to_params()?;
    let gs = Axis { param: Param::G, scale: Scale::Log, min: g.0, max: g.1, count: side };
    let ths = Axis { param: Param::TH, scale: Scale::Log, min: t_h.0, max: t_h.1, count: side };
    for axis in [&gs, &ths] {
        if !(axis.min > 0.0 && axis.max > axis.min) {
            return Err(format!("{} range must be positive and increasing", axis.param));
        }
    }
    let xs = gs.values();
    let mut out = Vec::with_capacity(side * side);
    for y in ths.values() {
        for &x in &xs {
            let c = params
                .to_builder()
                .g(x)
                .t_h(y)
                .build()
                .map_err(|e| e.to_string())
                .and_then(|p| evaluate_point(&p, Engine::Reduced, 0))
                .map_or(f64::NAN, |(_, r)| r.concurrence);
            out.push(c);
        }
    }
    Ok(out)
}

/// `[concurrence, chsh, fidelity, q_dot_c, p00, p01, p10, p11, |alpha|]`.
pub fn point(p: &DemoParams) -> Result<Vec<f64>, String> {
    let (s, r) = evaluate_point(&p.to_params()?, Engine::Reduced, 0)?;
    Ok(vec![r.concurrence, r.chsh, r.fidelity, r.q_dot_c, s.p00, s.p01, s.p10, s.p11, s.alpha.norm()])
}

/// Detector nodes followed by the density at each node.
pub fn detector(p: &DemoParams, points: usize) -> Result<Vec<f64>, String> {
    if !(3..=MAX_POINTS).contains(&points) {
        return Err(format!("points must be in 3..={MAX_POINTS}"));
    }
    let params = p.to_params()?;
    let grid = DGrid::for_params(&params, points).map_err(|e| e.to_string())?;
    let js = qfpme::steady_joint(&params, &grid).map_err(|e| e.to_string())?;
    let mut out = grid.nodes();
    out.extend(qfpme::marginal_detector(&js));
    Ok(out)
}

#[wasm_bindgen(js_name = heatmap)]
pub fn heatmap_js(base: &DemoParams, side: usize, g_min: f64, g_max: f64, th_min: f64, th_max: f64) -> Result<Vec<f64>, JsError> {
    heatmap(base, side, (g_min, g_max), (th_min, th_max)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = steadyPoint)]
pub fn point_js(p: &DemoParams) -> Result<Vec<f64>, JsError> {
    point(p).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = detectorDensity)]
pub fn detector_js(p: &DemoParams, points: usize) -> Result<Vec<f64>, JsError> {
    detector(p, points).map_err(|e| JsError::new(&e))
}
