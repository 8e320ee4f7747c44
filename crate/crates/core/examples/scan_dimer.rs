//! EP2 search on H(γ) = σx + iγσz.

use nhsim::classes::SimilarityClass;
use nhsim::ep::{scan, splitting_exponent, Axis, ScanConfig};
use nhsim::family::parse_family;
use nhsim::spectral::ToleranceConfig;

fn main() -> nhsim::Result<()> {
    let f = parse_family(include_bytes!("../data/dimer.json"))?;
    let cfg = ScanConfig::new(vec![Axis::new(-2.0, 2.0, 101)?]);
    let out = scan(&f, SimilarityClass::PseudoHermitian, &cfg)?;
    println!("constraints {:?}, {} seeds", out.system.labels(), out.seeds);
    print!("{}", out.to_jsonl(&f.names));
    for c in out.certified() {
        let fit = splitting_exponent(&f, &c.point, &[1.0], 12, &ToleranceConfig::default())?;
        println!(
            "gamma = {:+.10}: splitting exponent {:.4}",
            c.point[0], fit.exponent
        );
    }
    Ok(())
}
