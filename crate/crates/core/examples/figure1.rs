//! Prediction error against 1/γ through the experiment harness.
use qsq::harness::{run, Command, ExperimentConfig};

fn main() -> qsq::Result<()> {
    let cfg = ExperimentConfig::new(Command::Figure1, 1).set("unitaries", 4);
    let out = run(&cfg)?;
    if let Some(summary) = out.table("figure1_summary") {
        print!("{}", summary.to_csv());
    }
    for a in &out.assertions {
        println!("{} {}", if a.passed { "PASS" } else { "FAIL" }, a.name);
    }
    Ok(())
}
