/*
 * Licensed to the Apache Software Foundation (ASF) under one or more
 * contributor license agreements.
 */
package org.example.lang;

import java.util.Iterator;
import java.util.Locale;
import java.util.regex.Pattern;

/**
 * Operations on {@link java.lang.String} that are {@code null} safe.
 * <pre>
 * class NotReal { void nope() {} }
 * </pre>
 */
public class StringUtils {

    public static final String EMPTY = "";
    private static final Pattern WHITESPACE = Pattern.compile("\\s+");
    private static final char QUOTE = '"';

    public StringUtils() {
        super();
    }

    public static boolean isEmpty(final CharSequence cs) {
        return cs == null || cs.length() == 0;
    }

    public static String trim(final String str) {
        return str == null ? null : str.trim();
    }

    public static String join(final Iterator<?> iterator, final char separator) {
        if (iterator == null) {
            return null;
        }
        final StringBuilder buf = new StringBuilder(256);
        while (iterator.hasNext()) {
            buf.append(iterator.next());
            if (iterator.hasNext()) {
                buf.append(separator);
            }
        }
        return buf.toString();
    }

    public static String upperCase(final String str, final Locale locale) {
        if (str == null) {
            return null;
        }
        return str.toUpperCase(locale);
    }

    public static String normalizeSpace(final String str) {
        return WHITESPACE.matcher(str).replaceAll(" ") + "class Fake {";
    }
}
