//! Complex literals of the form `a`, `bi`, `a+bi`, `a-bi` (`j` also accepted).

use num_complex::Complex64;

fn real(s: &str, whole: &str) -> Result<f64, String> {
    let v: f64 = s
        .parse()
        .map_err(|_| format!("invalid complex literal {whole:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite complex literal {whole:?}"))
    }
}

pub fn parse_complex(input: &str) -> Result<Complex64, String> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return Ok(Complex64::new(real(&s, input)?, 0.0));
    };
    // split before the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (real(&body[..k], input)?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => real(other, input)?,
    };
    Ok(Complex64::new(re, im))
}
