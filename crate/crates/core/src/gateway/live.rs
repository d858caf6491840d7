use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{GatewayError, LlmClient, Prompt};

/// Sampling temperature sent with every live request.
pub const TEMPERATURE: f64 = 0.0;

/// A chat-completions style HTTP endpoint.
#[derive(Clone, Serialize, Deserialize)]
pub struct LiveEndpoint {
    pub endpoint: String,
    pub model: String,
    pub timeout_secs: u64,
    pub max_retries: u32,
    #[serde(skip)]
    pub api_key: Option<String>,
}

impl std::fmt::Debug for LiveEndpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LiveEndpoint")
            .field("endpoint", &self.endpoint)
            .field("model", &self.model)
            .field("timeout_secs", &self.timeout_secs)
            .field("max_retries", &self.max_retries)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .finish()
    }
}

impl LiveEndpoint {
    pub fn validate(&self) -> Result<(), GatewayError> {
        if !(self.endpoint.starts_with("http://") || self.endpoint.starts_with("https://")) {
            return Err(GatewayError::InvalidProvider(format!(
                "endpoint must be an http(s) URL, got {:?}",
                self.endpoint
            )));
        }
        if self.model.trim().is_empty() {
            return Err(GatewayError::InvalidProvider("model name is empty".into()));
        }
        if self.timeout_secs == 0 {
            return Err(GatewayError::InvalidProvider(
                "timeout must be positive".into(),
            ));
        }
        Ok(())
    }
}

pub struct LiveClient {
    endpoint: LiveEndpoint,
    http: reqwest::blocking::Client,
}

#[derive(Deserialize)]
struct Completion {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    content: String,
}

enum Attempt {
    Retry(GatewayError),
    Fatal(GatewayError),
}

impl LiveClient {
    pub fn new(endpoint: LiveEndpoint) -> Result<Self, GatewayError> {
        endpoint.validate()?;
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(endpoint.timeout_secs))
            .build()
            .map_err(|e| GatewayError::InvalidProvider(e.to_string()))?;
        Ok(LiveClient { endpoint, http })
    }

    fn attempt(&self, body: &serde_json::Value, attempts: usize) -> Result<String, Attempt> {
        let mut request = self.http.post(&self.endpoint.endpoint).json(body);
        if let Some(key) = &self.endpoint.api_key {
            request = request.bearer_auth(key);
        }
        let response = request.send().map_err(|e| {
            Attempt::Retry(GatewayError::Transport {
                attempts,
                message: e.to_string(),
            })
        })?;
        let status = response.status();
        let text = response.text().map_err(|e| {
            Attempt::Retry(GatewayError::Transport {
                attempts,
                message: e.to_string(),
            })
        })?;
        if !status.is_success() {
            let err = GatewayError::Http {
                status: status.as_u16(),
                body: text,
            };
            return Err(if status.is_server_error() || status.as_u16() == 429 {
                Attempt::Retry(err)
            } else {
                Attempt::Fatal(err)
            });
        }
        let completion: Completion = serde_json::from_str(&text)
            .map_err(|e| Attempt::Fatal(GatewayError::MalformedReply(e.to_string())))?;
        completion
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| Attempt::Fatal(GatewayError::MalformedReply("no choices".into())))
    }
}

impl LlmClient for LiveClient {
    fn call(&mut self, prompt: &Prompt) -> Result<String, GatewayError> {
        let body = json!({
            "model": self.endpoint.model,
            "temperature": TEMPERATURE,
            "messages": [
                {"role": "system", "content": prompt.system},
                {"role": "user", "content": prompt.user},
            ],
        });
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.attempt(&body, attempts) {
                Ok(text) => return Ok(text),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(e)) if attempts > self.endpoint.max_retries as usize => {
                    return Err(e)
                }
                Err(Attempt::Retry(_)) => {}
            }
        }
    }

    fn describe(&self) -> String {
        format!(
            "live {} model={} temperature={TEMPERATURE}",
            self.endpoint.endpoint, self.endpoint.model
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::Phase;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;
    use std::thread;

    /// Serves the given (status, body) replies, one per connection, and
    /// returns the request bodies it saw.
    fn stub(replies: Vec<(u16, &'static str)>) -> (String, thread::JoinHandle<Vec<String>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!(
            "http://{}/v1/chat/completions",
            listener.local_addr().unwrap()
        );
        let handle = thread::spawn(move || {
            let mut seen = Vec::new();
            for (status, body) in replies {
                let (stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut length = 0;
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    if line == "\r\n" || line.is_empty() {
                        break;
                    }
                    if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                        length = v.trim().parse().unwrap();
                    }
                }
                let mut request = vec![0; length];
                reader.read_exact(&mut request).unwrap();
                seen.push(String::from_utf8(request).unwrap());
                let mut stream = stream;
                write!(
                    stream,
                    "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                    body.len()
                )
                .unwrap();
            }
            seen
        });
        (url, handle)
    }

    fn endpoint(url: String, max_retries: u32) -> LiveEndpoint {
        LiveEndpoint {
            endpoint: url,
            model: "test-model".into(),
            timeout_secs: 5,
            max_retries,
            api_key: Some("secret".into()),
        }
    }

    fn prompt() -> Prompt {
        Prompt {
            phase: Phase::Translation,
            system: "sys".into(),
            user: "usr".into(),
        }
    }

    #[test]
    fn returns_first_choice_and_retries_server_errors() {
        let (url, handle) = stub(vec![
            (503, "busy"),
            (
                200,
                r#"{"choices":[{"message":{"role":"assistant","content":"fixed body"}}]}"#,
            ),
        ]);
        let mut client = LiveClient::new(endpoint(url, 2)).unwrap();
        assert_eq!(client.call(&prompt()).unwrap(), "fixed body");
        let seen = handle.join().unwrap();
        assert_eq!(seen.len(), 2);
        let request: serde_json::Value = serde_json::from_str(&seen[1]).unwrap();
        assert_eq!(request["model"], "test-model");
        assert_eq!(request["temperature"], 0.0);
        assert_eq!(request["messages"][0]["role"], "system");
        assert_eq!(request["messages"][1]["content"], "usr");
    }

    #[test]
    fn client_errors_are_not_retried() {
        let (url, handle) = stub(vec![(400, "bad request")]);
        let mut client = LiveClient::new(endpoint(url, 3)).unwrap();
        assert!(matches!(
            client.call(&prompt()),
            Err(GatewayError::Http { status: 400, .. })
        ));
        assert_eq!(handle.join().unwrap().len(), 1);
    }

    #[test]
    fn gives_up_after_retries() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/", listener.local_addr().unwrap());
        drop(listener);
        let mut client = LiveClient::new(endpoint(url, 1)).unwrap();
        match client.call(&prompt()) {
            Err(GatewayError::Transport { attempts, .. }) => assert_eq!(attempts, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_and_redaction() {
        let mut e = endpoint("ftp://x".into(), 0);
        assert!(e.validate().is_err());
        e.endpoint = "https://example.org".into();
        assert!(e.validate().is_ok());
        assert!(!format!("{e:?}").contains("secret"));
        e.model = " ".into();
        assert!(e.validate().is_err());
    }
}
