package org.example.xml;

import static org.junit.Assert.assertEquals;
import static org.junit.Assert.assertNull;

import org.junit.Before;
import org.junit.Test;

public class XmlParserTest {

    private XmlParser parser;

    @Before
    public void setUp() {
        parser = new XmlParser();
    }

    @Test
    public void parsesSingleElement() {
        assertEquals("root", parser.parse("<root/>").getName());
    }

    @Test(expected = IllegalArgumentException.class)
    public void rejectsMalformedInput() {
        parser.parse("<root>");
    }

    @Test
    public void emptyInputYieldsNull() {
        assertNull(parser.parse(""));
    }
}
