//! Fixed 12-significant-digit number formatting.

const DIGITS: usize = 12;

/// `x` rounded to 12 significant digits.
pub fn sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// `%.12g`-style text: fixed notation for moderate exponents, scientific
/// otherwise, trailing zeros removed.
pub fn text(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS as i32 {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn csv_row(fields: &[String]) -> String {
    fields.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_matches_printf_g() {
        assert_eq!(text(3.5777087639996634), "3.577708764");
        assert_eq!(text(1.0), "1");
        assert_eq!(text(-0.0), "0");
        assert_eq!(text(60.0), "60");
        assert_eq!(text(2.220446049250313e-16), "2.22044604925e-16");
        assert_eq!(text(1.5e-5), "1.5e-05");
        assert_eq!(text(1234567890123.0), "1.23456789012e+12");
        assert_eq!(text(0.0001), "0.0001");
    }

    #[test]
    fn sig_rounds_to_twelve_digits() {
        assert_eq!(sig(3.5777087639996634), 3.57770876400);
        assert_eq!(sig(-0.0), 0.0);
        assert_eq!(sig(1.0 / 3.0), 0.333333333333);
    }
}
