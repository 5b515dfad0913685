//! A minimal OpenAI-compatible chat-completions server on a local port.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde_json::{json, Value};

/// Decides the reply text from the user prompt; `None` answers HTTP 503.
pub type Responder = dyn Fn(usize, &str) -> Option<String> + Send + Sync;

/// A request body with its Authorization header.
pub type Seen = (Value, Option<String>);

pub struct MockServer {
    pub base_url: String,
    /// Request bodies in arrival order, with the Authorization header.
    pub requests: Arc<Mutex<Vec<Seen>>>,
}

pub fn serve(respond: Box<Responder>) -> MockServer {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base_url = format!("http://{}/v1", listener.local_addr().unwrap());
    let requests = Arc::new(Mutex::new(Vec::new()));
    let respond: Arc<Responder> = Arc::from(respond);
    let counter = Arc::new(AtomicUsize::new(0));
    let log = requests.clone();
    std::thread::spawn(move || {
        for stream in listener.incoming().flatten() {
            let (respond, counter, log) = (respond.clone(), counter.clone(), log.clone());
            std::thread::spawn(move || {
                let _ = handle(stream, &*respond, &counter, &log);
            });
        }
    });
    MockServer { base_url, requests }
}

fn handle(
    stream: TcpStream,
    respond: &Responder,
    counter: &AtomicUsize,
    log: &Mutex<Vec<Seen>>,
) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut out = stream;
    loop {
        let mut request_line = String::new();
        if reader.read_line(&mut request_line)? == 0 {
            return Ok(());
        }
        let (mut length, mut auth) = (0usize, None);
        loop {
            let mut line = String::new();
            reader.read_line(&mut line)?;
            let line = line.trim_end();
            if line.is_empty() {
                break;
            }
            if let Some((name, value)) = line.split_once(':') {
                match name.to_ascii_lowercase().as_str() {
                    "content-length" => length = value.trim().parse().unwrap_or(0),
                    "authorization" => auth = Some(value.trim().to_string()),
                    _ => {}
                }
            }
        }
        let mut body = vec![0; length];
        reader.read_exact(&mut body)?;
        let body: Value = serde_json::from_slice(&body).unwrap_or(Value::Null);
        let prompt = body["messages"][0]["content"].as_str().unwrap_or_default().to_string();
        log.lock().unwrap().push((body, auth));
        let n = counter.fetch_add(1, Ordering::SeqCst);
        let (status, payload) = match respond(n, &prompt) {
            Some(text) => (
                "200 OK",
                json!({
                    "id": format!("cmpl-{n}"),
                    "object": "chat.completion",
                    "choices": [{"index": 0, "message": {"role": "assistant", "content": text}, "finish_reason": "stop"}],
                    "usage": {"prompt_tokens": prompt.len() / 4, "completion_tokens": 8},
                }),
            ),
            None => ("503 Service Unavailable", json!({"error": "busy"})),
        };
        let payload = payload.to_string();
        write!(
            out,
            "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\n\r\n{payload}",
            payload.len()
        )?;
        out.flush()?;
    }
}
