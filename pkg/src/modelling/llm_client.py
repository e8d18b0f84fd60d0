"""Chat-completions transport for LLM agents, plus a directory-backed mock.

Both clients expose `complete(str_prompt, tup_key)` where tup_key is
(run_id, period, firm, attempt). The real client ignores the key; the mock uses
it to look up a canned reply.
"""
import logging
import os
from dataclasses import dataclass

import openai
from openai import OpenAI

from errors import ConfigError, TransportError

logger = logging.getLogger(__name__)

STR_DEFAULT_BASE_URL = "https://api.openai.com/v1"


@dataclass(frozen=True)
class LlmEndpointConfig:
    base_url: str = STR_DEFAULT_BASE_URL
    model_name: str = "gpt-4o"
    temperature: float = 1.0
    timeout_s: float = 60.0
    max_retries: int = 3
    api_key_env: str = "OPENAI_API_KEY"


def endpoint_from_dict(dict_llm):
    """Builds the endpoint from the [llm] config section."""
    dict_llm = dict_llm or {}
    try:
        endpoint = LlmEndpointConfig(
            base_url=str(dict_llm.get("base_url", STR_DEFAULT_BASE_URL)),
            model_name=str(dict_llm.get("model_name", "gpt-4o")),
            temperature=float(dict_llm.get("temperature", 1.0)),
            timeout_s=float(dict_llm.get("timeout_s", 60.0)),
            max_retries=int(dict_llm.get("max_retries", 3)),
            api_key_env=str(dict_llm.get("api_key_env", "OPENAI_API_KEY")),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError("Invalid [llm] section: " + str(e)) from e
    if endpoint.max_retries < 0 or endpoint.timeout_s <= 0:
        raise ConfigError("[llm] max_retries must be >= 0 and timeout_s > 0")
    return endpoint


class OpenAiChatClient:
    """One user message per call against any chat-completions endpoint."""

    def __init__(self, endpoint):
        self.endpoint = endpoint
        str_key = os.environ.get(endpoint.api_key_env, "").strip()
        if not str_key:
            raise ConfigError(
                f"Environment variable {endpoint.api_key_env} holding the API key is not set")
        self._client = OpenAI(
            api_key=str_key,
            base_url=endpoint.base_url,
            timeout=endpoint.timeout_s,
            max_retries=endpoint.max_retries,
        )

    def complete(self, str_prompt, tup_key=None):
        try:
            resp = self._client.chat.completions.create(
                model=self.endpoint.model_name,
                temperature=self.endpoint.temperature,
                messages=[{"role": "user", "content": str_prompt}],
            )
        except openai.APIError as e:
            raise TransportError(
                f"Chat endpoint {self.endpoint.base_url} failed after "
                f"{self.endpoint.max_retries} retries: {type(e).__name__}") from e
        return resp.choices[0].message.content or ""


class MockChatClient:
    """Replays canned replies stored as text files.

    Lookup order for key (run, period, firm, attempt):
    <run>/p<period>_f<firm>_a<attempt>.txt, p<period>_f<firm>_a<attempt>.txt,
    p<period>_f<firm>.txt, f<firm>.txt, default.txt. A missing reply is the
    empty string.
    """

    def __init__(self, str_directory):
        if not os.path.isdir(str_directory):
            raise ConfigError("Mock LLM directory not found: " + str(str_directory))
        self.str_directory = str_directory

    def candidate_paths(self, tup_key):
        str_run, int_period, int_firm, int_attempt = tup_key
        list_names = [
            os.path.join(str(str_run), f"p{int_period}_f{int_firm}_a{int_attempt}.txt"),
            f"p{int_period}_f{int_firm}_a{int_attempt}.txt",
            f"p{int_period}_f{int_firm}.txt",
            f"f{int_firm}.txt",
            "default.txt",
        ]
        return [os.path.join(self.str_directory, str_name) for str_name in list_names]

    def complete(self, str_prompt, tup_key):
        for str_path in self.candidate_paths(tup_key):
            if os.path.isfile(str_path):
                with open(str_path, "r", encoding="utf-8") as fp:
                    return fp.read()
        logger.debug("No canned reply for %s", tup_key)
        return ""


def create_chat_client(endpoint, str_mock_dir=None):
    if str_mock_dir:
        return MockChatClient(str_mock_dir)
    return OpenAiChatClient(endpoint)
