//! Adaptive Dormand–Prince 8(5,3) integrator used as the trajectory oracle.
//!
//! Steps are clipped so that every requested sample time is hit exactly.

use serde::{Deserialize, Serialize};

use crate::potentials::PotentialSpec;
use crate::steppers::State;
use crate::{Error, Result};

/// Requested accuracy of the reference trajectory. The per-step error
/// controls are set [`LOCAL_SAFETY`] times tighter, floored at twice the unit
/// roundoff, so that the accumulated error over a few hundred time units stays
/// near the requested value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTolerance {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

/// Ratio between the requested tolerance and the per-step error control.
pub const LOCAL_SAFETY: f64 = 100.0;

impl Default for ReferenceTolerance {
    fn default() -> Self {
        ReferenceTolerance { rel_tol: 1e-12, abs_tol: 1e-12 }
    }
}

impl ReferenceTolerance {
    pub fn uniform(tol: f64) -> Self {
        ReferenceTolerance { rel_tol: tol, abs_tol: tol }
    }

    fn local(&self) -> ReferenceTolerance {
        let floor = 2.0 * f64::EPSILON;
        ReferenceTolerance {
            rel_tol: (self.rel_tol / LOCAL_SAFETY).max(floor),
            abs_tol: (self.abs_tol / LOCAL_SAFETY).max(floor),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v <= 1e-8;
        if ok(self.rel_tol) && ok(self.abs_tol) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "reference tolerances must lie in (0, 1e-8], got {:?}",
                self
            )))
        }
    }
}

// Dormand–Prince 8(5,3) tableau. The system is autonomous, so the stage
// abscissae are not needed.
#[allow(clippy::excessive_precision)]
const A: [[f64; 11]; 12] = [
    [0.0; 11],
    [5.26001519587677318785587544488E-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.97250569845378994544595329183E-2, 5.91751709536136983633785987549E-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [2.95875854768068491816892993775E-2, 0.0, 8.87627564304205475450678981324E-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [2.41365134159266685502369798665E-1, 0.0, -8.84549479328286085344864962717E-1, 9.24834003261792003115737966543E-1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.7037037037037037037037037037E-2, 0.0, 0.0, 1.70828608729473871279604482173E-1, 1.25467687566822425016691814123E-1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.7109375E-2, 0.0, 0.0, 1.70252211019544039314978060272E-1, 6.02165389804559606850219397283E-2, -1.7578125E-2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.70920001185047927108779319836E-2, 0.0, 0.0, 1.70383925712239993810214054705E-1, 1.07262030446373284651809199168E-1, -1.53194377486244017527936158236E-2, 8.27378916381402288758473766002E-3, 0.0, 0.0, 0.0, 0.0],
    [6.24110958716075717114429577812E-1, 0.0, 0.0, -3.36089262944694129406857109825E0, -8.68219346841726006818189891453E-1, 2.75920996994467083049415600797E1, 2.01540675504778934086186788979E1, -4.34898841810699588477366255144E1, 0.0, 0.0, 0.0],
    [4.77662536438264365890433908527E-1, 0.0, 0.0, -2.48811461997166764192642586468E0, -5.90290826836842996371446475743E-1, 2.12300514481811942347288949897E1, 1.52792336328824235832596922938E1, -3.32882109689848629194453265587E1, -2.03312017085086261358222928593E-2, 0.0, 0.0],
    [-9.3714243008598732571704021658E-1, 0.0, 0.0, 5.18637242884406370830023853209E0, 1.09143734899672957818500254654E0, -8.14978701074692612513997267357E0, -1.85200656599969598641566180701E1, 2.27394870993505042818970056734E1, 2.49360555267965238987089396762E0, -3.0467644718982195003823669022E0, 0.0],
    [2.27331014751653820792359768449E0, 0.0, 0.0, -1.05344954667372501984066689879E1, -2.00087205822486249909675718444E0, -1.79589318631187989172765950534E1, 2.79488845294199600508499808837E1, -2.85899827713502369474065508674E0, -8.87285693353062954433549289258E0, 1.23605671757943030647266201528E1, 6.43392746015763530355970484046E-1],
];
#[allow(clippy::excessive_precision)]
const B: [f64; 12] = [5.42937341165687622380535766363E-2, 0.0, 0.0, 0.0, 0.0, 4.45031289275240888144113950566E0, 1.89151789931450038304281599044E0, -5.8012039600105847814672114227E0, 3.1116436695781989440891606237E-1, -1.52160949662516078556178806805E-1, 2.01365400804030348374776537501E-1, 4.47106157277725905176885569043E-2];
// Fifth-order error weights.
#[allow(clippy::excessive_precision)]
const ER: [f64; 12] = [0.1312004499419488073250102996E-01, 0.0, 0.0, 0.0, 0.0, -0.1225156446376204440720569753E+01, -0.4957589496572501915214079952E+00, 0.1664377182454986536961530415E+01, -0.3503288487499736816886487290E+00, 0.3341791187130174790297318841E+00, 0.8192320648511571246570742613E-01, -0.2235530786388629525884427845E-01];
// Third-order error weights on stages 1, 9 and 12.
#[allow(clippy::excessive_precision)]
const BHH: [f64; 3] = [0.244094488188976377952755905512E+00, 0.733846688281611857341361741547E+00, 0.220588235294117647058823529412E-01];

type Vec2 = [f64; 2];

fn rhs(spec: &PotentialSpec, y: Vec2) -> Vec2 {
    [y[1], -spec.force(y[0])]
}

struct Dopri<'a> {
    spec: &'a PotentialSpec,
    tol: ReferenceTolerance,
    t: f64,
    y: Vec2,
    k_first: Vec2,
    h: f64,
}

impl<'a> Dopri<'a> {
    fn new(spec: &'a PotentialSpec, s0: &State, tol: ReferenceTolerance) -> Self {
        let y = [s0.x, s0.p];
        let k_first = rhs(spec, y);
        // Starting step from the 8th-root scaling of the tolerance.
        let h = 0.5 * tol.rel_tol.powf(0.125);
        Dopri { spec, tol, t: s0.t, y, k_first, h }
    }

    // Attempts one step of size h; returns the candidate, its derivative and
    // the scaled error.
    fn trial(&self, h: f64) -> (Vec2, Vec2, f64) {
        let mut k = [[0.0; 2]; 12];
        k[0] = self.k_first;
        for i in 1..12 {
            let mut yi = self.y;
            for (j, kj) in k.iter().enumerate().take(i) {
                let a = A[i][j];
                if a != 0.0 {
                    yi[0] += h * a * kj[0];
                    yi[1] += h * a * kj[1];
                }
            }
            k[i] = rhs(self.spec, yi);
        }
        let mut y_new = self.y;
        let mut incr = [0.0; 2];
        let mut err5 = [0.0; 2];
        for i in 0..12 {
            for d in 0..2 {
                incr[d] += B[i] * k[i][d];
                err5[d] += ER[i] * k[i][d];
            }
        }
        for d in 0..2 {
            y_new[d] += h * incr[d];
        }
        let (mut e5, mut e3) = (0.0, 0.0);
        for d in 0..2 {
            let scale = self.tol.abs_tol + self.tol.rel_tol * self.y[d].abs().max(y_new[d].abs());
            let err3 = incr[d] - BHH[0] * k[0][d] - BHH[1] * k[8][d] - BHH[2] * k[11][d];
            e5 += (err5[d] / scale).powi(2);
            e3 += (err3 / scale).powi(2);
        }
        let deno = e5 + 0.01 * e3;
        let err = if deno > 0.0 { h.abs() * e5 / (2.0 * deno).sqrt() } else { 0.0 };
        let k_last = rhs(self.spec, y_new);
        (y_new, k_last, err)
    }

    fn advance_to(&mut self, target: f64) -> Result<()> {
        while self.t < target {
            let remaining = target - self.t;
            let mut h = self.h.min(remaining);
            loop {
                if h <= 1e-14 * self.t.abs().max(1.0) {
                    return Err(Error::ToleranceNotMet { t: self.t });
                }
                let (y_new, k_last, err) = self.trial(h);
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.125)).clamp(0.2, 5.0) };
                if err <= 1.0 && y_new.iter().all(|v| v.is_finite()) {
                    let landed = h == remaining;
                    self.t = if landed { target } else { self.t + h };
                    self.y = y_new;
                    self.k_first = k_last;
                    // A clipped final step says nothing about the natural step size.
                    if !landed || factor < 1.0 {
                        self.h = h * factor;
                    }
                    break;
                }
                h *= factor.min(0.9);
            }
        }
        Ok(())
    }
}

/// Reference states at each time in `t_grid` (strictly increasing, not
/// before `s0.t`).
pub fn reference_trajectory(
    spec: &PotentialSpec,
    s0: &State,
    t_grid: &[f64],
    tol: ReferenceTolerance,
) -> Result<Vec<State>> {
    tol.validate()?;
    if let Some(first) = t_grid.first() {
        if *first < s0.t {
            return Err(Error::InvalidParameter(format!("sample time {first} precedes the start {}", s0.t)));
        }
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("sample times must be strictly increasing".into()));
    }
    let mut solver = Dopri::new(spec, s0, tol.local());
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        solver.advance_to(t)?;
        out.push(State { t, x: solver.y[0], p: solver.y[1] });
    }
    Ok(out)
}

/// Reference state at a single time.
pub fn reference_state(spec: &PotentialSpec, s0: &State, t: f64, tol: ReferenceTolerance) -> Result<State> {
    Ok(reference_trajectory(spec, s0, &[t], tol)?[0])
}
