import pytest

from gazeread import simplify as sp


class FlakyClient:
    """Fails a fixed number of times before succeeding."""

    client_id = "flaky"

    def __init__(self, failures, reply="Simple."):
        self.failures = failures
        self.reply = reply
        self.calls = 0

    def complete(self, system, user):
        self.calls += 1
        if self.calls <= self.failures:
            raise sp.TransportError("boom")
        return self.reply


class TestPrompt:
    def test_two_role_prompt(self):
        req = sp.build_prompt(4, "The cat sat.")
        assert req.sentence_index == 4
        assert req.user_content == "The cat sat."
        assert req.system_instruction == sp.SYSTEM_PROMPT
        assert "replace the user's complex sentence" in sp.SYSTEM_PROMPT
        assert "Output only the simplified sentence(s)." in sp.SYSTEM_PROMPT

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            sp.build_prompt(0, "")


class TestSimplify:
    def test_result_fields(self):
        req = sp.build_prompt(1, "Hello there.")
        res = sp.simplify(req, sp.EchoClient())
        assert res.simplified == "Hello there."
        assert res.original == "Hello there."
        assert res.sentence_index == 1
        assert res.client_id == "echo"
        assert res.latency_ms >= 0

    def test_retries_then_succeeds(self):
        client = FlakyClient(failures=2)
        res = sp.simplify(sp.build_prompt(0, "X y z."), client, retries=3)
        assert res.simplified == "Simple." and client.calls == 3

    def test_retries_exhausted(self):
        client = FlakyClient(failures=5)
        with pytest.raises(sp.TransportError):
            sp.simplify(sp.build_prompt(0, "X y z."), client, retries=3)
        assert client.calls == 3

    def test_whitespace_stripped(self):
        client = sp.MockClient({"A b.": "  C d. \n"})
        res = sp.simplify(sp.build_prompt(0, "A b."), client)
        assert res.simplified == "C d."

    def test_empty_completion_rejected(self):
        client = sp.MockClient({"A b.": "   "})
        with pytest.raises(sp.EmptySimplificationError):
            sp.simplify(sp.build_prompt(0, "A b."), client)


class TestReplacement:
    def test_replace_and_undo(self):
        sentences = ["One.", "Two.", "Three."]
        updated, record = sp.replace_sentence(sentences, 1, "Too. Also two.")
        assert updated == ["One.", "Too. Also two.", "Three."]
        assert sentences == ["One.", "Two.", "Three."]  # input untouched
        assert record == sp.ChangeRecord(1, "Two.", "Too. Also two.")
        assert sp.undo_replacement(updated, record) == sentences

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            sp.replace_sentence(["A."], 1, "B.")


class TestMockClient:
    def test_bundled_pairs_lookup(self):
        pairs = sp.load_fixture_pairs()
        assert len(pairs) == 3
        client = sp.MockClient.with_bundled_pairs()
        for p in pairs:
            assert client.complete(sp.SYSTEM_PROMPT, p["original"]) == p["simplified"]

    def test_fallback_rules(self):
        client = sp.MockClient()
        out = client.complete(sp.SYSTEM_PROMPT, "Police suspect it was a deliberate act.")
        assert out == "Police think it was done on purpose."

    def test_deterministic(self):
        client = sp.MockClient.with_bundled_pairs()
        u = sp.load_fixture_pairs()[0]["original"]
        assert client.complete("s", u) == client.complete("s", u)


class TestHttpClient:
    def test_parses_chat_payload(self, monkeypatch):
        import requests

        captured = {}

        class FakeResp:
            def raise_for_status(self):
                pass

            def json(self):
                return {"choices": [{"message": {"content": "Short."}}]}

        def fake_post(url, json=None, headers=None, timeout=None):
            captured.update(url=url, body=json, headers=headers)
            return FakeResp()

        monkeypatch.setattr(requests, "post", fake_post)
        client = sp.HttpChatClient("http://x/v1/chat/completions", "m1", api_key="k")
        assert client.complete("sys", "usr") == "Short."
        assert captured["body"]["messages"] == [
            {"role": "system", "content": "sys"},
            {"role": "user", "content": "usr"},
        ]
        assert captured["headers"]["Authorization"] == "Bearer k"

    def test_malformed_payload_is_transport_error(self, monkeypatch):
        import requests

        class FakeResp:
            def raise_for_status(self):
                pass

            def json(self):
                return {"oops": True}

        monkeypatch.setattr(requests, "post", lambda *a, **k: FakeResp())
        client = sp.HttpChatClient("http://x", "m1")
        with pytest.raises(sp.TransportError):
            client.complete("s", "u")
