//! Drives the command-line front end in process and prints its report.

fn main() {
    let args = ["normform", "theorem", "--seed", "7", "--pcut", "2000"];
    let code = normform::cli::run(args);
    eprintln!("exit code {code}");
}
