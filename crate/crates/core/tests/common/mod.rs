use chanheat::channel::{ChannelBasis, EPS_FLOOR};
use chanheat::model::{SystemParams, OMEGA_FLOOR};

/// Γ_kn written out directly from the channel-rate expression.
pub fn transcribed_rates(b: &ChannelBasis, p: &SystemParams) -> [[f64; 3]; 3] {
    let floor = |x: f64| if x.abs() >= EPS_FLOOR { x } else { EPS_FLOOR.copysign(if x < 0.0 { -1.0 } else { 1.0 }) };
    let nbar = |w: f64| {
        let w = w.abs().max(OMEGA_FLOOR);
        if p.t_bath == 0.0 {
            0.0
        } else {
            1.0 / ((p.hbar_over_kb * w / p.t_bath).exp() - 1.0)
        }
    };
    let gamma_bar = |w: f64| p.gamma_r * nbar(w);
    let gamma_vac = |w: f64| if w > 0.0 { p.gamma_r } else { 0.0 };
    let mut out = [[0.0; 3]; 3];
    for k in 0..3 {
        for n in 0..3 {
            if k == n {
                continue;
            }
            let (ek, en) = (floor(b.energies[k]), floor(b.energies[n]));
            let (dk, dn) = (floor(b.detunings[k]), floor(b.detunings[n]));
            let bath = gamma_bar(en - ek) + gamma_bar(ek - en) + gamma_vac(ek - en);
            let num = (p.eta * (1.0 / dk + 1.0 / dn) + p.drive * (1.0 / ek + 1.0 / en)).powi(2);
            let den = (1.0 + p.eta.powi(2) / dk.powi(2) + p.drive.powi(2) / ek.powi(2))
                * (1.0 + p.eta.powi(2) / dn.powi(2) + p.drive.powi(2) / en.powi(2));
            out[k][n] = bath * num / den;
        }
    }
    out
}
