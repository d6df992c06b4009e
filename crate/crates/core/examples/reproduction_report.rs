//! Every published number next to the value computed here.

fn main() -> spinorlz::Result<()> {
    let with_oracle = std::env::args().all(|a| a != "--skip-oracle");
    let report = spinorlz::report::reproduction_report(with_oracle)?;
    print!("{}", report.to_text());
    println!("{}", if report.all_pass() { "all checks pass" } else { "some checks FAIL" });
    Ok(())
}
