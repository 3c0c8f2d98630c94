//! Chat-endpoint dataset generation with an offline fallback.
//!
//! The toolkit can ask a chat-completion endpoint to produce labelled
//! sentences using a fixed prompt; replies are expected to carry a trailing
//! `(<Word> - <digit>)` tag per line. All parsing is tolerant and reports
//! unparseable lines rather than failing, and the raw reply is returned so
//! callers can archive it.

use serde_json::json;

use super::generate::{generate_synthetic, Complexity, GenConfig};
use super::{DataError, Dataset, Result, Sentence};

/// Prompt for short (at most five word) sentences.
pub const LOW_COMPLEXITY_PROMPT: &str = "Generate sentences with a maximum length of five words \
discussing financial topics or stocks in a positive, neutral or negative way. At the end of each \
sentence, mention its respective label with negative being 0, neutral being 1 and positive being 2.";

/// Prompt for longer, detailed sentences.
pub const MODERATE_COMPLEXITY_PROMPT: &str = "Generate detailed sentences discussing financial \
topics or stocks in a positive, neutral or negative way. At the end of each sentence, mention its \
respective label with negative being 0, neutral being 1 and positive being 2.";

pub fn prompt_for(complexity: Complexity) -> &'static str {
    match complexity {
        Complexity::Low => LOW_COMPLEXITY_PROMPT,
        Complexity::Moderate => MODERATE_COMPLEXITY_PROMPT,
    }
}

/// Anything that can answer a single-prompt chat completion.
pub trait ChatClient {
    fn complete(&self, prompt: &str) -> Result<String>;
}

/// Connection settings for an OpenAI-style chat-completions endpoint.
/// The API key is read from `api_key_env` at request time.
#[derive(Debug, Clone)]
pub struct EndpointConfig {
    pub url: String,
    pub model: String,
    pub api_key_env: String,
}

pub struct HttpChatClient {
    config: EndpointConfig,
    client: reqwest::blocking::Client,
}

impl HttpChatClient {
    pub fn new(config: EndpointConfig) -> Self {
        HttpChatClient {
            config,
            client: reqwest::blocking::Client::new(),
        }
    }
}

impl ChatClient for HttpChatClient {
    fn complete(&self, prompt: &str) -> Result<String> {
        let key = std::env::var(&self.config.api_key_env).map_err(|_| {
            DataError::Auth(format!("environment variable {} not set", self.config.api_key_env))
        })?;
        let body = json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
        });
        let response = self
            .client
            .post(&self.config.url)
            .bearer_auth(key)
            .json(&body)
            .send()
            .map_err(|e| DataError::Network(e.to_string()))?;
        if response.status() == reqwest::StatusCode::UNAUTHORIZED {
            return Err(DataError::Auth("endpoint rejected credentials".into()));
        }
        if !response.status().is_success() {
            return Err(DataError::Network(format!("endpoint returned {}", response.status())));
        }
        let payload: serde_json::Value =
            response.json().map_err(|e| DataError::Network(e.to_string()))?;
        payload["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| DataError::Network("reply missing message content".into()))
    }
}

/// Offline stand-in: answers with synthetic sentences rendered in the same
/// labelled-line format a real endpoint would use.
pub struct OfflineTemplateClient {
    pub config: GenConfig,
}

impl ChatClient for OfflineTemplateClient {
    fn complete(&self, _prompt: &str) -> Result<String> {
        let dataset = generate_synthetic(&self.config)?;
        let mut out = String::new();
        for s in &dataset.sentences {
            let word = match s.label {
                0 => "Negative",
                1 => "Neutral",
                _ => "Positive",
            };
            out.push_str(&format!("{} ({} - {})\n", s.text, word, s.label));
        }
        Ok(out)
    }
}

fn label_word_value(word: &str) -> Option<u8> {
    match word.to_lowercase().as_str() {
        "negative" => Some(0),
        "neutral" => Some(1),
        "positive" => Some(2),
        _ => None,
    }
}

/// Parses one reply line of the form `<sentence> (<Word> - <digit>)`.
/// Whitespace and case are tolerated; a label word that contradicts the
/// digit makes the line unparseable.
fn parse_reply_line(line: &str) -> std::result::Result<Sentence, String> {
    let trimmed = line.trim();
    let open = trimmed.rfind('(').ok_or("no label group")?;
    let close = trimmed[open..].find(')').ok_or("unterminated label group")? + open;
    let inner = &trimmed[open + 1..close];
    let (word, digit) = inner.split_once('-').ok_or("label group missing `-`")?;
    let digit: u8 = digit.trim().parse().map_err(|_| "label is not a digit".to_string())?;
    if digit > 2 {
        return Err(format!("label {digit} out of range"));
    }
    if let Some(expected) = label_word_value(word.trim()) {
        if expected != digit {
            return Err(format!("label word {:?} contradicts digit {digit}", word.trim()));
        }
    }
    let text = trimmed[..open].trim();
    Sentence::new(text, digit).ok_or_else(|| "empty sentence before label".to_string())
}

/// Splits a raw reply into sentences, reporting unparseable lines with their
/// line numbers.
pub fn parse_reply_lines(raw: &str) -> (Vec<Sentence>, Vec<(usize, String)>) {
    let mut sentences = Vec::new();
    let mut unparseable = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match parse_reply_line(line) {
            Ok(sentence) => sentences.push(sentence),
            Err(reason) => unparseable.push((idx + 1, reason)),
        }
    }
    (sentences, unparseable)
}

/// Result of a chat-generation run; `raw` is the unedited reply for
/// archiving.
#[derive(Debug, Clone)]
pub struct LlmGenResult {
    pub raw: String,
    pub dataset: Dataset,
    pub unparseable: Vec<(usize, String)>,
}

/// Sends the fixed prompt for `complexity` and parses the reply.
pub fn llm_generate(client: &dyn ChatClient, complexity: Complexity) -> Result<LlmGenResult> {
    let raw = client.complete(prompt_for(complexity))?;
    let (sentences, unparseable) = parse_reply_lines(&raw);
    if sentences.is_empty() {
        return Err(DataError::NoParsableLines);
    }
    Ok(LlmGenResult {
        raw,
        dataset: Dataset::new(sentences, 3),
        unparseable,
    })
}
