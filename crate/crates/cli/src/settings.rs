//! Built-in defaults, overridden by the profile, overridden by flags.

use std::path::Path;

use wise_core::profile::Profile;
use wise_core::stream::assemble::DEFAULT_WINDOW_MS;

use crate::error::CliError;
use crate::StreamArgs;

pub fn load_profile(path: Option<&Path>) -> Result<Profile, CliError> {
    match path {
        None => Ok(Profile::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(&p.display().to_string(), e))?;
            Ok(Profile::from_toml(&text)?)
        }
    }
}

/// First present value wins.
pub fn pick<T: Copy>(flag: Option<T>, profile: Option<T>, default: T) -> T {
    flag.or(profile).unwrap_or(default)
}

pub fn window_ms(args: &StreamArgs, profile: &Profile) -> u64 {
    pick(args.window_ms, profile.config.window_ms, DEFAULT_WINDOW_MS)
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(&path.display().to_string(), e))
}
