//! The message importance measure (MIM) family: MIM, conditional MIM, and the
//! importance loss of a transfer process.
//!
//! MIM is the entropy-like functional `L(w, X) = sum_i p_i e^{w (1 - p_i)}`.
//! The exponential weighting emphasizes rare symbols; for `w <= 2/max p_i`
//! it is concave and uniform-maximal, mirroring Shannon entropy.

use crate::error::{MimError, Result};
use crate::probability::{posterior, Channel, Distribution};

/// The importance coefficient `w > 0`.
///
/// Raw MIM evaluation is well-defined for every positive coefficient; the
/// concavity-dependent guarantees additionally need [`Self::region_one`] (or
/// the distribution-free sufficient bound `w <= 2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImportanceParam {
    varpi: f64,
}

impl ImportanceParam {
    pub fn new(varpi: f64) -> Result<Self> {
        if !varpi.is_finite() || varpi <= 0.0 {
            return Err(MimError::OutOfRange(format!(
                "importance coefficient {varpi} must be positive"
            )));
        }
        Ok(Self { varpi })
    }

    pub fn varpi(&self) -> f64 {
        self.varpi
    }

    /// True iff `w <= 2 / max_i p(x_i)`, the regime where MIM behaves like
    /// Shannon entropy (concave, maximized by the uniform distribution).
    pub fn region_one(&self, d: &Distribution) -> bool {
        self.varpi <= 2.0 / d.max_prob()
    }

    /// Distribution-free sufficient condition for nonnegative importance loss.
    pub fn guarantees_nonnegative_loss(&self) -> bool {
        self.varpi <= 2.0
    }
}

/// Per-event importance contribution `p e^{w (1 - p)}`.
pub fn self_scoring(p_i: f64, w: ImportanceParam) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_i) {
        return Err(MimError::OutOfRange(format!("probability {p_i} outside [0, 1]")));
    }
    Ok(p_i * (w.varpi() * (1.0 - p_i)).exp())
}

/// MIM of a distribution: `sum_i p_i e^{w (1 - p_i)}`. Lies in `[1, e^w]`.
pub fn mim(d: &Distribution, w: ImportanceParam) -> f64 {
    mim_slice(d.probs(), w.varpi())
}

pub(crate) fn mim_slice(probs: &[f64], varpi: f64) -> f64 {
    probs.iter().map(|&p| p * (varpi * (1.0 - p)).exp()).sum()
}

/// MIM of the two-point distribution `(p, 1-p)`.
pub fn mim_binary(p: f64, w: ImportanceParam) -> f64 {
    let v = w.varpi();
    p * (v * (1.0 - p)).exp() + (1.0 - p) * (v * p).exp()
}

/// Conditional MIM in the posterior orientation: the marginal-weighted MIM of
/// p(x|y), `sum_j p(y_j) sum_i p(x_i|y_j) e^{w (1 - p(x_i|y_j))}`.
///
/// This is the orientation every capacity and distortion result uses;
/// unreachable outputs contribute nothing.
pub fn cmim(px: &Distribution, ch: &Channel, w: ImportanceParam) -> Result<f64> {
    let post = posterior(px, ch)?;
    let mut total = 0.0;
    for j in 0..post.outputs() {
        let pyj = post.output_marginal()[j];
        if pyj == 0.0 {
            continue;
        }
        total += pyj * mim_slice(post.row(j), w.varpi());
    }
    Ok(total)
}

/// Conditional MIM in the forward orientation, applied directly to channel
/// rows: `sum_i p(x_i) sum_j p(y_j|x_i) e^{w (1 - p(y_j|x_i))}`.
pub fn cmim_forward(px: &Distribution, ch: &Channel, w: ImportanceParam) -> Result<f64> {
    if px.alphabet_size() != ch.rows() {
        return Err(MimError::ShapeMismatch {
            context: "input distribution vs channel rows",
            expected: ch.rows(),
            actual: px.alphabet_size(),
        });
    }
    Ok(px
        .probs()
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, &p)| p * mim_slice(ch.row(i), w.varpi()))
        .sum())
}

/// MIM, CMIM, and their difference for one source/channel pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    pub mim_value: f64,
    pub cmim_value: f64,
    /// Exactly `mim_value - cmim_value`; nonnegative whenever `w <= 2`.
    pub loss: f64,
}

/// Importance loss of a transfer process: `L(w, X) - L(w, X|Y)`.
///
/// Nonnegativity is guaranteed only for `w <= 2` (Jensen on the concave
/// self-scoring function); callers probing larger coefficients can check
/// [`ImportanceParam::guarantees_nonnegative_loss`] first.
pub fn importance_loss(px: &Distribution, ch: &Channel, w: ImportanceParam) -> Result<LossReport> {
    let mim_value = mim(px, w);
    let cmim_value = cmim(px, ch, w)?;
    Ok(LossReport {
        mim_value,
        cmim_value,
        loss: mim_value - cmim_value,
    })
}

/// Loss evaluated on a raw nonnegative weight vector that may sit slightly
/// off the simplex. The finite-difference optimizers perturb coordinates
/// independently, so they need the objective to extend smoothly off-simplex:
/// the posterior is scale-free in `px` while the MIM terms use the raw
/// weights.
pub(crate) fn importance_loss_raw(px: &[f64], ch: &Channel, varpi: f64) -> f64 {
    let mim_value = mim_slice(px, varpi);
    let py = crate::probability::output_marginal_raw(px, ch);
    let mut cmim_value = 0.0;
    for (j, &pyj) in py.iter().enumerate() {
        if pyj <= 0.0 {
            continue;
        }
        let row_mim: f64 = (0..ch.rows())
            .map(|i| {
                let q = px[i] * ch.get(i, j) / pyj;
                q * (varpi * (1.0 - q)).exp()
            })
            .sum();
        cmim_value += pyj * row_mim;
    }
    mim_value - cmim_value
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: f64) -> ImportanceParam {
        ImportanceParam::new(v).unwrap()
    }

    #[test]
    fn importance_param_domain() {
        assert!(ImportanceParam::new(0.0).is_err());
        assert!(ImportanceParam::new(-1.0).is_err());
        assert!(ImportanceParam::new(f64::NAN).is_err());
        let p = w(1.5);
        assert!(p.region_one(&Distribution::uniform(2))); // 2/max p = 4
        assert!(!w(4.1).region_one(&Distribution::uniform(2)));
    }

    #[test]
    fn mim_known_values() {
        // symmetry gives L = e^{w/2}
        let d = Distribution::uniform(2);
        assert!((mim(&d, w(1.0)) - 0.5f64.exp()).abs() < 1e-12);
        // degenerate distribution
        let d = Distribution::new(vec![1.0, 0.0]).unwrap();
        assert!((mim(&d, w(0.7)) - 1.0).abs() < 1e-12);
        assert!((mim(&d, w(2.0)) - 1.0).abs() < 1e-12);
        // matches the distortionless rate plus one
        let d = Distribution::new(vec![0.1, 0.9]).unwrap();
        assert!((mim(&d, w(0.2)) - 1.0379029423362613).abs() < 1e-12);
    }

    #[test]
    fn self_scoring_values() {
        assert_eq!(self_scoring(0.0, w(1.3)).unwrap(), 0.0);
        assert_eq!(self_scoring(1.0, w(1.3)).unwrap(), 1.0);
        // 0.5 e
        assert!((self_scoring(0.5, w(2.0)).unwrap() - 0.5 * 1f64.exp()).abs() < 1e-12);
        assert!(self_scoring(-0.1, w(1.0)).is_err());
        assert!(self_scoring(1.1, w(1.0)).is_err());
    }

    #[test]
    fn cmim_identity_channel_is_one() {
        for probs in [vec![0.3, 0.7], vec![0.2, 0.3, 0.5], vec![1.0, 0.0]] {
            let n = probs.len();
            let px = Distribution::new(probs).unwrap();
            let c = cmim(&px, &Channel::identity(n), w(1.7)).unwrap();
            assert!((c - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cmim_independent_channel_equals_mim() {
        let px = Distribution::new(vec![0.25, 0.75]).unwrap();
        let out = Distribution::new(vec![0.4, 0.1, 0.5]).unwrap();
        let ch = Channel::identical_rows(2, &out);
        let c = cmim(&px, &ch, w(0.9)).unwrap();
        assert!((c - mim(&px, w(0.9))).abs() < 1e-12);
    }

    #[test]
    fn cmim_uniform_bsc_value() {
        // e^{0.5} - 0.4081... at beta_s = 0.1, w = 1
        let px = Distribution::uniform(2);
        let ch = Channel::binary_symmetric(0.1).unwrap();
        let c = cmim(&px, &ch, w(1.0)).unwrap();
        assert!((c - 1.240614137383778).abs() < 1e-12);
        assert!((c - (0.5f64.exp() - 0.4081)).abs() < 5e-4);
    }

    #[test]
    fn cmim_forward_uses_channel_rows() {
        let px = Distribution::new(vec![0.3, 0.7]).unwrap();
        let ch = Channel::binary_symmetric(0.1).unwrap();
        let want = mim_binary(0.1, w(1.0)); // every row is (0.9, 0.1)
        assert!((cmim_forward(&px, &ch, w(1.0)).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn loss_identity_and_independence() {
        let px = Distribution::new(vec![0.3, 0.7]).unwrap();
        let report = importance_loss(&px, &Channel::identity(2), w(0.2)).unwrap();
        assert!((report.loss - (mim(&px, w(0.2)) - 1.0)).abs() < 1e-12);
        assert_eq!(report.loss, report.mim_value - report.cmim_value);

        let out = Distribution::new(vec![0.6, 0.4]).unwrap();
        let flat = Channel::identical_rows(2, &out);
        assert!(importance_loss(&px, &flat, w(0.2)).unwrap().loss.abs() < 1e-12);
    }

    #[test]
    fn loss_uniform_bsc_golden() {
        let px = Distribution::uniform(2);
        let ch = Channel::binary_symmetric(0.3).unwrap();
        let report = importance_loss(&px, &ch, w(1.0)).unwrap();
        assert!((report.loss - 0.0997).abs() < 5e-4);
    }

    #[test]
    fn raw_loss_matches_checked_loss_on_simplex() {
        let px = Distribution::new(vec![0.2, 0.5, 0.3]).unwrap();
        let ch = Channel::from_rows(vec![
            vec![0.6, 0.4],
            vec![0.5, 0.5],
            vec![0.1, 0.9],
        ])
        .unwrap();
        let a = importance_loss(&px, &ch, w(1.1)).unwrap().loss;
        let b = importance_loss_raw(px.probs(), &ch, 1.1);
        assert!((a - b).abs() < 1e-14);
    }
}
