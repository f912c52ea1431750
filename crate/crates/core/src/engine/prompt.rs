//! The specialist prompt sent alongside every image.
//!
//! The prompt lives in a versioned template file so it can be recalibrated
//! without touching code. The default template ships embedded; an
//! alternative file can be supplied through the run configuration.

use std::path::Path;

use thiserror::Error;

use crate::domain::Sense;

/// Default template, compiled in from `templates/prompt_v1.txt`.
pub const DEFAULT_TEMPLATE: &str = include_str!("../../templates/prompt_v1.txt");

const SECTIONS: [&str; 4] = ["role", "criteria", "scoring", "output"];

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("cannot read prompt template {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("prompt template is missing the [{0}] section")]
    MissingSection(&'static str),
    #[error("prompt template must mention the criterion token {0}")]
    MissingToken(&'static str),
}

/// A prompt split into its four named sections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub role_line: String,
    pub criteria_block: String,
    pub scoring_block: String,
    pub output_instruction: String,
}

impl PromptTemplate {
    /// The built-in template.
    pub fn default_template() -> PromptTemplate {
        PromptTemplate::parse(DEFAULT_TEMPLATE).expect("embedded template is well-formed")
    }

    pub fn from_file(path: &Path) -> Result<PromptTemplate, PromptError> {
        let text = std::fs::read_to_string(path).map_err(|source| PromptError::Read {
            path: path.display().to_string(),
            source,
        })?;
        PromptTemplate::parse(&text)
    }

    /// Parse a template file: `[section]` headers, each followed by its
    /// text, in any order. All four sections are required.
    pub fn parse(text: &str) -> Result<PromptTemplate, PromptError> {
        let mut parts: [Option<String>; 4] = [None, None, None, None];
        let mut current: Option<usize> = None;
        let mut buf = String::new();

        let flush =
            |current: &mut Option<usize>, buf: &mut String, parts: &mut [Option<String>; 4]| {
                if let Some(idx) = current.take() {
                    parts[idx] = Some(buf.trim().to_string());
                }
                buf.clear();
            };

        for line in text.lines() {
            let trimmed = line.trim();
            if trimmed.starts_with('[') && trimmed.ends_with(']') {
                let name = &trimmed[1..trimmed.len() - 1];
                if let Some(idx) = SECTIONS.iter().position(|s| *s == name) {
                    flush(&mut current, &mut buf, &mut parts);
                    current = Some(idx);
                    continue;
                }
            }
            buf.push_str(line);
            buf.push('\n');
        }
        flush(&mut current, &mut buf, &mut parts);

        let [role, criteria, scoring, output] = parts;
        let template = PromptTemplate {
            role_line: role.ok_or(PromptError::MissingSection("role"))?,
            criteria_block: criteria.ok_or(PromptError::MissingSection("criteria"))?,
            scoring_block: scoring.ok_or(PromptError::MissingSection("scoring"))?,
            output_instruction: output.ok_or(PromptError::MissingSection("output"))?,
        };
        template.validate()?;
        Ok(template)
    }

    /// Every canonical criterion token must appear somewhere in the
    /// rendered prompt, otherwise replies cannot be parsed back.
    fn validate(&self) -> Result<(), PromptError> {
        let rendered = self.render();
        for sense in Sense::ALL {
            if !rendered.contains(sense.token()) {
                return Err(PromptError::MissingToken(sense.token()));
            }
        }
        Ok(())
    }

    /// Assemble the prompt text. Deterministic: same template, same bytes.
    pub fn render(&self) -> String {
        format!(
            "{}\n\n{}\n\n{}\n\n{}\n",
            self.role_line, self.criteria_block, self.scoring_block, self.output_instruction
        )
    }
}

/// Render the default specialist prompt.
pub fn build_prompt() -> String {
    PromptTemplate::default_template().render()
}
