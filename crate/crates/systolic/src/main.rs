use std::process::exit;

fn main() {
    exit(systolic::cli::run());
}
