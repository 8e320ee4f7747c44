//! Driving the command-line interface in-process.

use nhsim::cli::run;

fn main() {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let trimer = format!("{data}/trimer.json");
    let generated = run(
        [
            "nhsim", "generate", "--class", "chiral", "--dim", "2", "--seed", "9",
        ],
        &mut &b""[..],
        None,
    );
    let classified = run(["nhsim", "classify", "-"], &mut generated.stdout.as_bytes(), None);
    println!("classify exit {}:\n{}", classified.exit_code, classified.stdout);

    let scanned = run(
        [
            "nhsim",
            "--output",
            "csv",
            "scan",
            &trimer,
            "--class",
            "pseudo-hermitian",
            "--grid",
            "gamma=0:3:61",
        ],
        &mut &b""[..],
        None,
    );
    print!("{}{}", scanned.stdout, scanned.stderr);

    let bad = run(
        ["nhsim", "scan", &trimer, "--class", "psh", "--grid", "zeta=0:1:3"],
        &mut &b""[..],
        None,
    );
    print!("exit {}: {}", bad.exit_code, bad.stderr);
}
