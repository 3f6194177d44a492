import pytest


@pytest.fixture
def acceptance_line(request):
    """Print a status line on the real terminal, past any output capture."""
    capman = request.config.pluginmanager.getplugin("capturemanager")

    def emit(text: str) -> None:
        if capman is not None:
            with capman.global_and_fixture_disabled():
                print(text, flush=True)
        else:
            print(text, flush=True)

    return emit
