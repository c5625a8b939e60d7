//! Runs the operator checks on a composition oracle and on each broken one.

use pmcone::operator::{
    broken, check_norm_preserving, check_pp_preserving, check_round_trip, check_scalar_preserving,
    compose, ConeFamily, Corruption, IsometryOracle, Probes,
};
use pmcone::rational::{frac, int};
use pmcone::reconstruct::random_probes;
use pmcone::space::Bijection;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run(mut oracle: IsometryOracle, probes: &Probes) {
    let scalars = [int(0), frac(1, 2), int(2)];
    println!("{}", oracle.name());
    for report in [
        check_norm_preserving(&mut oracle, probes),
        check_scalar_preserving(&mut oracle, probes, &scalars),
        check_pp_preserving(&mut oracle, probes),
        check_round_trip(&mut oracle, probes),
    ] {
        println!("  {report}");
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = pmcone::random::random_space(&mut rng, "x", 4, 8);
    let y = pmcone::random::random_space(&mut rng, "y", 4, 8);
    let phi = Bijection::new(vec![2, 0, 3, 1])?;
    let probes = Probes {
        forward: random_probes(&mut rng, &x, 8, &ConeFamily::Pm),
        inverse: random_probes(&mut rng, &y, 8, &ConeFamily::Pm),
    };
    run(compose(phi.clone(), &x, &y, ConeFamily::Pm)?, &probes);
    for corruption in [
        Corruption::ConstantShift(int(1)),
        Corruption::EntrywiseSquare,
        Corruption::ProbePermutation,
        Corruption::Flatten,
    ] {
        run(
            broken(corruption, phi.clone(), &x, &y, ConeFamily::Pm)?,
            &probes,
        );
    }
    Ok(())
}
