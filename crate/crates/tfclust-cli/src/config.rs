use std::path::Path;

use toml::Value;

use crate::Failure;

/// Key-value settings from a `--config` TOML file. Keys use the flag names
/// of the invoked subcommand; explicit command-line flags take precedence.
#[derive(Debug, Default)]
pub struct FileConfig {
    table: toml::map::Map<String, Value>,
    source: String,
}

impl FileConfig {
    pub fn empty() -> Self {
        FileConfig::default()
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = crate::io::read_string(path)?;
        let table: toml::Table = text.parse().map_err(|e| {
            Failure::validation(format!("{}: invalid TOML: {e}", path.display()))
        })?;
        Ok(FileConfig { table, source: path.display().to_string() })
    }

    /// Rejects keys that are not flags of the running subcommand, so typos
    /// fail loudly instead of being ignored.
    pub fn check_keys(&self, known: &[String]) -> Result<(), Failure> {
        for key in self.table.keys() {
            if !known.iter().any(|k| k == key) {
                return Err(Failure::validation(format!(
                    "{}: unknown config key \"{key}\"",
                    self.source
                )));
            }
        }
        Ok(())
    }

    fn wrong_type(&self, key: &str, want: &str) -> Failure {
        Failure::validation(format!("{}: config key \"{key}\" is not a {want}", self.source))
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, Failure> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Float(v)) => Ok(Some(*v)),
            Some(Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(_) => Err(self.wrong_type(key, "number")),
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, Failure> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Integer(v)) if *v >= 0 => Ok(Some(*v as u64)),
            Some(_) => Err(self.wrong_type(key, "nonnegative integer")),
        }
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, Failure> {
        Ok(self.u64(key)?.map(|v| v as usize))
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>, Failure> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Boolean(v)) => Ok(Some(*v)),
            Some(_) => Err(self.wrong_type(key, "boolean")),
        }
    }

    pub fn string(&self, key: &str) -> Result<Option<String>, Failure> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::String(v)) => Ok(Some(v.clone())),
            Some(_) => Err(self.wrong_type(key, "string")),
        }
    }

    /// Lists come either as TOML arrays or as comma-separated strings.
    pub fn string_list(&self, key: &str) -> Result<Option<Vec<String>>, Failure> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::String(v)) => {
                Ok(Some(v.split(',').map(|s| s.trim().to_string()).collect()))
            }
            Some(Value::Array(items)) => items
                .iter()
                .map(|item| match item {
                    Value::String(s) => Ok(s.clone()),
                    Value::Integer(i) => Ok(i.to_string()),
                    Value::Float(f) => Ok(f.to_string()),
                    _ => Err(self.wrong_type(key, "list of strings or numbers")),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(_) => Err(self.wrong_type(key, "list")),
        }
    }
}
