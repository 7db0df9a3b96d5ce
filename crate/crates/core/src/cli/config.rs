use super::CliError;
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

/// Flat `key = value` run configuration. Blank lines and everything after a
/// `#` are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

fn bad(key: &str, msg: impl Into<String>) -> CliError {
    CliError::Config { key: key.to_string(), msg: msg.into() }
}

impl FromStr for Config {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(bad(line, format!("line {} is not of the form key = value", no + 1)));
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(bad("", format!("line {} has an empty key", no + 1)));
            }
            if values.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(bad(key, "given more than once"));
            }
        }
        Ok(Config { values })
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        text.parse()
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    /// Fails on the first key outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(bad(k, format!("unknown key; expected one of {}", allowed.join(", ")))),
            None => Ok(()),
        }
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn parse_one<T: FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
        raw.parse().map_err(|_| bad(key, format!("cannot parse `{raw}`")))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.values.get(key).map(|raw| Self::parse_one(key, raw)).transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.get(key)?.ok_or_else(|| bad(key, "missing"))
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma-separated list; an empty value gives an empty list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError> {
        self.values
            .get(key)
            .map(|raw| {
                raw.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| Self::parse_one(key, s))
                    .collect()
            })
            .transpose()
    }

    /// Positive finite real.
    pub fn positive(&self, key: &str, value: f64) -> Result<f64, CliError> {
        if value > 0.0 && value.is_finite() {
            Ok(value)
        } else {
            Err(bad(key, format!("{value} must be positive and finite")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_lists() {
        let c: Config = "# run\np = 3\nN_list = 16, 24,32 # sizes\n\nT=0.8\n".parse().unwrap();
        assert_eq!(c.require::<u32>("p").unwrap(), 3);
        assert_eq!(c.list::<usize>("N_list").unwrap().unwrap(), vec![16, 24, 32]);
        assert_eq!(c.get_or("eta", 0.05).unwrap(), 0.05);
        assert!(c.check_keys(&["p", "N_list", "T"]).is_ok());
    }

    #[test]
    fn errors_name_the_key() {
        let c: Config = "p = three\n".parse().unwrap();
        match c.require::<u32>("p") {
            Err(CliError::Config { key, .. }) => assert_eq!(key, "p"),
            other => panic!("{other:?}"),
        }
        match "p = 3\np = 4".parse::<Config>() {
            Err(CliError::Config { key, .. }) => assert_eq!(key, "p"),
            other => panic!("{other:?}"),
        }
        let c: Config = "temperature = 1".parse().unwrap();
        match c.check_keys(&["T"]) {
            Err(CliError::Config { key, .. }) => assert_eq!(key, "temperature"),
            other => panic!("{other:?}"),
        }
        assert!("just words".parse::<Config>().is_err());
    }
}
