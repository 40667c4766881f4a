import pytest

from pattern_forge import parse

# Fixture document modeled on the running example: a section of classed divs,
# head metadata, and three figures, the last of which captions with <p>
# instead of <figcaption>.
FIXTURE_DOC = """\
<html>
<head>
<meta content="Graphics Design Co">
<meta content="portfolio graphics">
<link href="style.css">
</head>
<body>
<section class="content">
<div class="intro">
<p>Welcome</p>
</div>
<div class="sidebar">
<p>About us</p>
</div>
<div class="main">
<p>Our work</p>
</div>
</section>
<meta itemprop="rating">
<aside>
<div id="nav-box">
<p>Links</p>
</div>
</aside>
<figure>
<img src="a.png">
<figcaption>Barry's chart</figcaption>
</figure>
<figure>
<img src="b.png">
<figcaption>Barry's logo</figcaption>
</figure>
<figure>
<img src="c.png">
<p>Alice's caption</p>
</figure>
</body>
</html>
"""


def position_after(text: str, marker: str) -> tuple[int, int]:
    """1-based (line, col) of the cursor sitting right after marker's first occurrence."""
    offset = text.index(marker) + len(marker)
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def position_of(text: str, marker: str) -> tuple[int, int]:
    """1-based (line, col) of the first character of marker."""
    offset = text.index(marker)
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


@pytest.fixture
def fixture_doc():
    return parse(FIXTURE_DOC)


# Collected by the acceptance tests; echoed after the run so the pass/fail
# checklist survives output capturing.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_line("")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
