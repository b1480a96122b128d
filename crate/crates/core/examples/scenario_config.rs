//! Parsing, resolving and running a scenario configuration in-process.

use relphase::scenarios::{emit_config, execute, parse_config};

const TEXT: &str = r#"
scenario = "negativity_map"
[system]
j = 1
[params]
projector = "basis:1"
n_theta_plot = 9
n_phi_plot = 4
[output]
normalization = "paper_4_2"
"#;

fn main() {
    let cfg = match parse_config(TEXT) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    print!("{}", emit_config(&cfg));
    let report = execute(&cfg).expect("scenario runs");
    print!("\n{}", report.to_text());
    if let Err(e) = parse_config("scenario = \"two_slit\"\n[system]\ndim = 0\n") {
        println!("\nrejected: {e}");
    }
}
