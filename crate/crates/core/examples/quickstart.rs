use bosonet::metrics::linear_entropy;
use bosonet::network::{build_hamiltonian, dissipative_matrix, normal_modes, NetworkSpec};
use bosonet::phase_space::build_cat_family;
use bosonet::propagation::Dynamics;
use bosonet::reservoirs::{rates, Bath, Profile, ReservoirSpec};
use num_complex::Complex64;

fn main() -> Result<(), bosonet::Error> {
    let spec = NetworkSpec::all_to_all(2, 1.0, 0.2)?;
    let h = build_hamiltonian(&spec);
    let res = ReservoirSpec::identical(2, Profile::WhiteNoise { gamma: 0.05 }, Bath::Occupation(0.5));
    let r = rates(&res, &spec, &normal_modes(&h)?, false)?;
    let dy = Dynamics::new(dissipative_matrix(&h, &r.gamma)?, r.upsilon)?;
    let cat = build_cat_family(2, 1, 1, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 1)?;
    for t in [0.0, 1.0, 2.0, 4.0] {
        let b = dy.bundle(t)?;
        println!("t = {t}: D = {:?}, S = {:.6}", b.dcoef.as_slice(), linear_entropy(&cat, &b)?);
    }
    Ok(())
}
