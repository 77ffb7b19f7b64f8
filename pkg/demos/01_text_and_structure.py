"""How report text and Java source turn into search terms.

Run: python demos/01_text_and_structure.py
"""

from buglocate.codestruct import parse_source
from buglocate.porter import porter_stem
from buglocate.textprep import SOURCE_CODE, split_identifier, tokenize

# Identifiers are split on camelCase, underscores and digits. The compound
# form is kept too, so a report that quotes the whole name still matches.
for name in ["HttpClientBuilder", "parseXMLDocument", "MAX_RETRY_COUNT", "utf8Decoder"]:
    print(f"{name:<20} -> {split_identifier(name)}")

# Stop words and Java keywords are dropped, and what is left is stemmed.
print()
print(tokenize("NullPointerException thrown when the connectionPool is closed twice"))
print(tokenize("public void closeConnections() { return; }", SOURCE_CODE))
print([porter_stem(w) for w in ["connections", "closing", "generalizations"]])

# The structure parser pulls out just the names the scorers need.
source = """
package org.demo.net;

import org.demo.util.Retry;
import java.util.List;

/* public class Commented {} */
public class ConnectionPool extends Pool {
    private final List<Connection> idle;

    public ConnectionPool(int size) { idle = new ArrayList<>(size); }

    public Connection borrow() throws TimeoutException {
        return idle.isEmpty() ? open() : idle.remove(0);
    }

    private Connection open() { return Retry.run(() -> new Connection()); }
}
"""
fs = parse_source("src/org/demo/net/ConnectionPool.java", source)
print()
print("package:", fs.package)
print("classes:", fs.classes)
print("methods:", fs.methods)
print("imports:", fs.imports)
