//! Post-selected EPR pairs after four conversions: fidelity, success
//! probability and CHSH value, with the `S = 2` boundary.
//!
//! `cargo run --release --example epr_chsh [eta_a] [eta_b]`

use diamond_qfc::qubit::{
    bell_value_from_fidelity, chsh_value, epr_postselect, fidelity_family_state, to_bell_basis,
};

fn main() -> diamond_qfc::Result<()> {
    let mut args = std::env::args().skip(1);
    let a: f64 = args.next().map_or(0.9, |s| s.parse().expect("eta_a"));
    let b: f64 = args.next().map_or(0.4, |s| s.parse().expect("eta_b"));

    let r = epr_postselect(a, a, b, b)?;
    println!(
        "eta_A = {a}, eta_B = {b}: F = {:.6}, P_c = {:.6}, S = {:.6} (2√2 F² = {:.6}), branch {:+}",
        r.fidelity,
        r.p_c,
        r.s,
        bell_value_from_fidelity(r.fidelity),
        r.branch
    );

    let f = 2f64.powf(-0.25);
    for sign in [1.0, -1.0] {
        let rho = fidelity_family_state(f, sign);
        let bell = to_bell_basis(&rho);
        println!(
            "F = 2^-1/4, sign {sign:+}: S = {:.6}, Bell block [[{:.3}, {:.3}], [{:.3}, {:.3}]]",
            chsh_value(&rho),
            bell[(0, 0)].re,
            bell[(0, 1)].re,
            bell[(1, 0)].re,
            bell[(1, 1)].re
        );
    }

    println!("eta_B needed for S > 2 at each eta_A:");
    for k in 1..=10 {
        let ea = k as f64 / 10.0;
        // S > 2 ⇔ 2ab > (√2 − 1)(a² + b²); smaller root of the quadratic in b/a
        let t = (1.0 - (1.0 - (2f64.sqrt() - 1.0).powi(2)).sqrt()) / (2f64.sqrt() - 1.0);
        println!("  eta_A = {ea:.1}: eta_B > {:.4}", t * ea);
    }
    Ok(())
}
