//! Converted Fock and coherent states, their fidelities, and the loss
//! channel oracle for comparison.
//!
//! `cargo run --release --example state_conversion [eta]`

use diamond_qfc::state::{
    coherent_amplitudes, coherent_fidelity, convert_coherent, convert_fock, fidelity,
    fock_fidelity, loss_channel_oracle, ChannelCoeff, DensityMatrix,
};
use num_complex::Complex64 as C64;

fn main() -> diamond_qfc::Result<()> {
    let eta: f64 = std::env::args().nth(1).map_or(0.5, |s| s.parse().expect("eta"));

    for q in 1..=3 {
        let out = convert_fock(q, eta, q + 1)?;
        let oracle = loss_channel_oracle(&DensityMatrix::fock(q, q + 1)?, eta)?;
        let diag: Vec<String> = out.diagonal().iter().map(|p| format!("{p:.4}")).collect();
        println!(
            "|{q}> -> diag [{}], oracle diff {:.1e}, F = {:.6} (closed form {:.6})",
            diag.join(", "),
            out.max_abs_diff(&oracle),
            out.get(q, q).re.sqrt(),
            fock_fidelity(q, eta)
        );
    }

    // the coefficient phase is removed by a phase shifter
    let coeff = ChannelCoeff::new(C64::from_polar(eta.sqrt(), 1.1))?;
    for beta in [1.0, 10f64.sqrt()] {
        let b = C64::new(beta, 0.0);
        let dim = 40;
        let out = convert_coherent(b, coeff, true, dim)?;
        let f = fidelity(&out, &coherent_amplitudes(b, dim).0)?;
        println!(
            "|beta = {beta:.3}> -> F = {f:.9} (closed form {:.9})",
            coherent_fidelity(b, eta)
        );
    }
    Ok(())
}
