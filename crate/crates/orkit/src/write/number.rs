/// Shortest rendering of a double that parses back to the same bit pattern.
///
/// Rust's `Display` and `LowerExp` both emit the minimal digit string that
/// round-trips; this picks whichever of the two forms is shorter, preferring
/// fixed notation on ties. Integral values come out without a decimal point
/// ("5", not "5.0").
pub fn format_f64(x: f64) -> String {
    let fixed = format!("{x}");
    let scientific = format!("{x:e}");
    if scientific.len() < fixed.len() {
        scientific
    } else {
        fixed
    }
}
