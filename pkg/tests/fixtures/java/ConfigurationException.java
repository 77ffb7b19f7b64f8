package org.example.config;

public class ConfigurationException extends RuntimeException {

    private static final long serialVersionUID = -7311894129382931293L;

    public ConfigurationException() {
        super();
    }

    public ConfigurationException(String message) {
        super(message);
    }

    public ConfigurationException(String message, Throwable cause) {
        super(message, cause);
    }
}
