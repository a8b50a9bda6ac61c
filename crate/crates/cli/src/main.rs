use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if let Some(text) = poisson_cli::help_or_version(&args) {
        print!("{text}");
        return;
    }
    let report = poisson_cli::run(&args);
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(report.to_json().as_bytes());
    let _ = out.flush();
    std::process::exit(report.status.exit_code());
}
