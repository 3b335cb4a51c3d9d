//! Runs a JSON-described experiment through the harness into a temporary directory.

use risbeam::harness::{run, ExperimentConfig};

fn main() -> risbeam::Result<()> {
    let out = std::env::temp_dir().join("risbeam-example-l-sweep");
    let json = format!(
        r#"{{ "experiment": "l_sweep", "n": 16, "roi": [[-20, 20]], "l_values": [2, 4, 8],
             "grid_step": 0.5, "master_seed": 11, "output": {:?} }}"#,
        out
    );
    let config = ExperimentConfig::from_json(&json)?;
    let summary = run(&config)?;
    println!("{:.2} s, files {:?}", summary.wall_clock_s, summary.files);
    print!("{}", std::fs::read_to_string(out.join("l_sweep.csv"))?);
    Ok(())
}
