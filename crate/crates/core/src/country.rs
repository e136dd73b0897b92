//! Uppercase country-code identifiers shared by every pipeline stage.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Why a string was rejected as a country code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountryCodeError {
    #[error("country code is empty")]
    Empty,
    #[error("country code `{0}` must be uppercase ASCII letters")]
    NotUppercaseAscii(String),
}

/// An uppercase ASCII country identifier: two-letter FIPS style by default,
/// with longer actor codes accepted when the event schema asks for them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountryCode(String);

impl CountryCode {
    pub fn new(code: &str) -> Result<Self, CountryCodeError> {
        if code.is_empty() {
            return Err(CountryCodeError::Empty);
        }
        if !code.bytes().all(|b| b.is_ascii_uppercase()) {
            return Err(CountryCodeError::NotUppercaseAscii(code.to_owned()));
        }
        Ok(Self(code.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for CountryCode {
    type Err = CountryCodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

impl AsRef<str> for CountryCode {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_uppercase_ascii() {
        assert_eq!(CountryCode::new("US").unwrap().as_str(), "US");
        assert_eq!(CountryCode::new("CHN").unwrap().as_str(), "CHN");
    }

    #[test]
    fn rejects_empty_and_lowercase() {
        assert_eq!(CountryCode::new(""), Err(CountryCodeError::Empty));
        assert!(matches!(
            CountryCode::new("us"),
            Err(CountryCodeError::NotUppercaseAscii(_))
        ));
        assert!(matches!(
            CountryCode::new("U1"),
            Err(CountryCodeError::NotUppercaseAscii(_))
        ));
    }

    #[test]
    fn orders_lexicographically() {
        let ja = CountryCode::new("JA").unwrap();
        let rs = CountryCode::new("RS").unwrap();
        assert!(ja < rs);
    }
}
