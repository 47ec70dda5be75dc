use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::rc::Rc;

/// A Prolog number. Integers are exact: values outside `i64` are held as
/// big integers, and `Big` never holds a value that fits in `Int`.
#[derive(Clone)]
pub enum Number {
    Int(i64),
    Big(Rc<BigInt>),
    Float(f64),
}

impl Number {
    pub fn from_big(b: BigInt) -> Number {
        match b.to_i64() {
            Some(n) => Number::Int(n),
            None => Number::Big(Rc::new(b)),
        }
    }

    pub fn is_float(&self) -> bool {
        matches!(self, Number::Float(_))
    }

    pub fn is_integer(&self) -> bool {
        !self.is_float()
    }

    pub fn to_big(&self) -> Option<BigInt> {
        match self {
            Number::Int(n) => Some(BigInt::from(*n)),
            Number::Big(b) => Some((**b).clone()),
            Number::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Int(n) => *n as f64,
            Number::Big(b) => b.to_f64().unwrap_or(f64::NAN),
            Number::Float(f) => *f,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Number::Int(n) => *n == 0,
            Number::Big(b) => b.is_zero(),
            Number::Float(f) => *f == 0.0,
        }
    }

    /// Same type and value; `1` and `1.0` are distinct.
    pub fn identical(&self, other: &Number) -> bool {
        match (self, other) {
            (Number::Int(a), Number::Int(b)) => a == b,
            (Number::Big(a), Number::Big(b)) => a == b,
            (Number::Float(a), Number::Float(b)) => a.to_bits() == b.to_bits() || a == b,
            _ => false,
        }
    }

    /// Numeric comparison across representations.
    pub fn compare_value(&self, other: &Number) -> Ordering {
        match (self, other) {
            (Number::Int(a), Number::Int(b)) => a.cmp(b),
            (Number::Float(_), _) | (_, Number::Float(_)) => {
                self.to_f64().partial_cmp(&other.to_f64()).unwrap_or(Ordering::Equal)
            }
            _ => self.to_big().unwrap().cmp(&other.to_big().unwrap()),
        }
    }

    /// Standard order of terms: by value, and a float precedes an equal integer.
    pub fn standard_order(&self, other: &Number) -> Ordering {
        match self.compare_value(other) {
            Ordering::Equal => match (self.is_float(), other.is_float()) {
                (true, false) => Ordering::Less,
                (false, true) => Ordering::Greater,
                _ => Ordering::Equal,
            },
            o => o,
        }
    }
}

impl PartialEq for Number {
    fn eq(&self, other: &Number) -> bool {
        self.identical(other)
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Int(n) => write!(f, "{n}"),
            Number::Big(b) => write!(f, "{b}"),
            Number::Float(x) => f.write_str(&format_float(*x)),
        }
    }
}

impl fmt::Debug for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Shortest text that reads back as the same float, always with a `.`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:?}");
    if let Some(pos) = s.find('e') {
        let (mant, exp) = s.split_at(pos);
        let mant = if mant.contains('.') { mant.to_string() } else { format!("{mant}.0") };
        let exp = &exp[1..];
        let exp = if exp.starts_with('-') { exp.to_string() } else { format!("+{exp}") };
        format!("{mant}e{exp}")
    } else if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_always_carry_a_point() {
        assert_eq!(format_float(1.0), "1.0");
        assert_eq!(format_float(2.75), "2.75");
        assert_eq!(format_float(1e22), "1.0e+22");
        assert_eq!(format_float(1.5e-9), "1.5e-9");
    }

    #[test]
    fn big_normalizes_to_int() {
        assert!(matches!(Number::from_big(BigInt::from(5)), Number::Int(5)));
        let big = BigInt::from(i64::MAX) + 1;
        assert!(matches!(Number::from_big(big), Number::Big(_)));
    }

    #[test]
    fn float_precedes_equal_int() {
        assert_eq!(Number::Float(1.0).standard_order(&Number::Int(1)), Ordering::Less);
        assert!(!Number::Float(1.0).identical(&Number::Int(1)));
    }
}
