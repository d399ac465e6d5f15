//! Running a configured experiment and writing its report.

use htester::harness::{run_experiment, summarize, write_report, ExperimentConfig, ReportFormat};

const CONFIG: &str = r#"
scenario = "demo"
tester = "simple"
dims = [8, 16]
eps = [0.3]
delta = [0.2]
trials = 4
seed = 42

[distribution]
kind = "uniform"
lo = 0.5
hi = 1.0
isotropic = true

[oracle]
kind = "noisy"
rate = 0.02
"#;

fn main() -> htester::Result<()> {
    let cfg = ExperimentConfig::from_toml_with(CONFIG, &["constants.k1=4".to_string()])?;
    let rows = run_experiment(&cfg, 2)?;
    write_report(
        &rows,
        ReportFormat::Csv,
        std::io::stdout().lock(),
        "<stdout>",
    )?;
    for s in summarize(&rows) {
        eprintln!("{s}");
    }
    Ok(())
}
