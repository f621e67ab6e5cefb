//! Minimal tour: parse states, compute an l1 coherence, condition on a
//! beam-splitter measurement, and compare with the closed form.

use quadcoh::analytic;
use quadcoh::{coherence, conditioning, BeamSplitter, IntegrationConfig, StateSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = IntegrationConfig::default();

    // l1 coherence of a thermal state with one photon on average.
    let rho: StateSpec = "thermal:nbar=1".parse()?;
    let c = coherence::l1_coherence(&rho.kernel()?, &config)?;
    println!("C  = {:.8}  (thermal, nbar = 1)", c.value);

    // Mix with vacuum on a balanced splitter, measure the reflected port,
    // and keep the conditional state at outcome x0' = 0.
    let rho0: StateSpec = "vacuum".parse()?;
    let bs = BeamSplitter::from_transmission(std::f64::consts::FRAC_1_SQRT_2)?;
    let cp =
        conditioning::conditional_coherence(&rho.kernel()?, &rho0.kernel()?, &bs, 0.0, &config)?;
    println!("C' = {:.8}  (conditioned on x0' = 0)", cp.value);

    // Both inputs are Gaussian Schell-model states, so the combination law
    // predicts the output in closed form.
    let p = rho.gaussian_schell()?.expect("thermal is Schell-model");
    let p0 = rho0.gaussian_schell()?.expect("vacuum is Schell-model");
    let predicted =
        analytic::output_l1(analytic::gaussian_l1(&p), analytic::gaussian_l1(&p0), &bs)?;
    println!("C' = {predicted:.8}  (closed form)");

    Ok(())
}
