//! JSON-safe integers: numbers up to 2^53 in magnitude, base-10 strings
//! beyond.

use serde::{Deserialize, Deserializer, Serializer};
use serde_json::Value;

pub const SAFE_INT: i128 = 1 << 53;

pub fn int_value(v: i128) -> Value {
    if v.abs() <= SAFE_INT {
        Value::from(v as i64)
    } else {
        Value::String(v.to_string())
    }
}

pub fn value_int(v: &Value) -> Option<i128> {
    match v {
        Value::Number(n) => n.as_i64().map(i128::from).or_else(|| n.as_u64().map(i128::from)),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

/// `#[serde(with = "crate::json::safe_u64")]`
pub mod safe_u64 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        if *v as i128 <= SAFE_INT {
            s.serialize_u64(*v)
        } else {
            s.serialize_str(&v.to_string())
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let v = Value::deserialize(d)?;
        value_int(&v)
            .and_then(|i| u64::try_from(i).ok())
            .ok_or_else(|| serde::de::Error::custom("expected an unsigned integer"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn switches_to_strings_above_2_53() {
        assert_eq!(int_value(42), Value::from(42));
        assert_eq!(int_value(SAFE_INT), Value::from(1i64 << 53));
        assert_eq!(int_value(SAFE_INT + 1), Value::String("9007199254740993".into()));
        assert_eq!(int_value(-SAFE_INT - 1), Value::String("-9007199254740993".into()));
        for v in [0, -5, SAFE_INT + 7, i128::from(u64::MAX)] {
            assert_eq!(value_int(&int_value(v)), Some(v));
        }
        assert_eq!(value_int(&Value::Bool(true)), None);
    }
}
