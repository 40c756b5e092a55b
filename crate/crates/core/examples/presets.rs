//! Runs a shipped preset through the config harness, writes its tables and
//! reshapes one for plotting.

use meadd::harness::{emit_plot_data, preset, run};

fn main() -> meadd::Result<()> {
    let name = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "robustness-table".into());
    let output = run(&preset(&name)?)?;
    print!("{}", output.summary().to_csv());

    let dir = std::env::temp_dir().join("meadd-example");
    for path in output.write(&dir)? {
        println!("wrote {}", path.display());
    }
    if let Some(records) = output.table("records") {
        if name == "fig6" {
            let plot = emit_plot_data(records, "fig6")?;
            println!("fig6 plot data: {} rows", plot.len());
        }
    }
    println!("all expectations met: {}", output.passed());
    Ok(())
}
