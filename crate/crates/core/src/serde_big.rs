//! Big integers travel through JSON as decimal strings; plain JSON integers are also
//! accepted on input.

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Raw {
    Text(String),
    Int(i64),
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
    let raw: Vec<Raw> = Vec::deserialize(d)?;
    raw.into_iter()
        .map(|r| match r {
            Raw::Int(n) => Ok(BigInt::from(n)),
            Raw::Text(t) => t.trim().parse().map_err(|_| serde::de::Error::custom(format!("bad integer {t:?}"))),
        })
        .collect()
}
